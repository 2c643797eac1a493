#include "trigkrylov/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace trigkrylov {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

std::unique_ptr<SparseCSR> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("matrix market: empty input");
  std::istringstream banner(lower(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") {
    throw Error("matrix market: missing %%MatrixMarket matrix banner");
  }
  if (format != "coordinate") throw Error("matrix market: only coordinate format is supported");
  if (field != "real" && field != "integer" && field != "double") {
    throw Error("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw Error("matrix market: unsupported symmetry '" + symmetry + "'");
  }

  if (!next_data_line(in, line)) throw Error("matrix market: missing size line");
  std::int64_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0) {
      throw Error("matrix market: malformed size line");
    }
  }
  if (rows != cols) throw DimensionError("matrix market: operator must be square");

  const bool sym = symmetry == "symmetric";
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(sym ? 2 * nnz : nnz));
  for (std::int64_t k = 0; k < nnz; ++k) {
    if (!next_data_line(in, line)) throw Error("matrix market: fewer entries than declared");
    std::istringstream ss(line);
    std::int64_t i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) throw Error("matrix market: malformed entry line '" + line + "'");
    if (i < 1 || j < 1 || i > rows || j > cols) {
      throw DimensionError("matrix market: entry index out of range");
    }
    entries.push_back({i - 1, j - 1, v});
    if (sym && i != j) entries.push_back({j - 1, i - 1, v});
  }
  return std::make_unique<SparseCSR>(static_cast<std::size_t>(rows), std::move(entries),
                                     sym ? std::optional<bool>(true) : std::nullopt);
}

std::unique_ptr<SparseCSR> read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("matrix market: cannot open " + path.string());
  return read_matrix_market(in);
}

Vector read_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("vector file: cannot open " + path.string());
  std::string line;
  std::vector<double> values;
  bool matrix_market = false;
  bool size_seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("%%MatrixMarket", 0) == 0) {
      if (lower(line).find("array") == std::string::npos) {
        throw Error("vector file: only Matrix Market array format is supported");
      }
      matrix_market = true;
      continue;
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    if (matrix_market && !size_seen) {
      size_seen = true;
      continue;
    }
    std::istringstream ss(line);
    double v = 0.0;
    while (ss >> v) values.push_back(v);
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_vector_binary(std::ostream& out, const Vector& x) {
  out << "n " << x.size() << '\n';
  out.write(reinterpret_cast<const char*>(x.data()),
            static_cast<std::streamsize>(x.size() * sizeof(double)));
  if (!out) throw Error("vector dump: write failed");
}

void write_vector_binary(const std::filesystem::path& path, const Vector& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("vector dump: cannot open " + path.string());
  write_vector_binary(out, x);
}

Vector read_vector_binary(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error("vector dump: missing header");
  std::istringstream hs(header);
  std::string tag;
  long long n = -1;
  if (!(hs >> tag >> n) || tag != "n" || n < 0) throw Error("vector dump: bad header '" + header + "'");
  Vector x(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(double))) {
    throw Error("vector dump: truncated payload");
  }
  return x;
}

Vector read_vector_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("vector dump: cannot open " + path.string());
  return read_vector_binary(in);
}

}  // namespace trigkrylov
