#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>

#include "trigkrylov/linop.hpp"

namespace trigkrylov {

/// Reads a real square Matrix Market coordinate file ("general" or
/// "symmetric"). Symmetric files are expanded to both triangles and the
/// resulting operator is flagged symmetric.
std::unique_ptr<SparseCSR> read_matrix_market(std::istream& in);
std::unique_ptr<SparseCSR> read_matrix_market(const std::filesystem::path& path);

/// Reads a Matrix Market "array" file holding a single real column, or a
/// plain whitespace-separated list of numbers.
Vector read_vector_file(const std::filesystem::path& path);

/// One text line "n <dim>" followed by dim native-endian doubles.
void write_vector_binary(std::ostream& out, const Vector& x);
void write_vector_binary(const std::filesystem::path& path, const Vector& x);
Vector read_vector_binary(std::istream& in);
Vector read_vector_binary(const std::filesystem::path& path);

}  // namespace trigkrylov
