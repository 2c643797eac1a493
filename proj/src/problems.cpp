#include "trigkrylov/problems.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "trigkrylov/integrators.hpp"
#include "trigkrylov/smallfun.hpp"

namespace trigkrylov {

namespace {

constexpr double kPi = std::numbers::pi;

void check_wave(const WaveProblemSpec& s) {
  if (s.nx < 1 || s.ny < 1 || s.nz < 1) throw PreconditionError("wave problem: empty grid");
  if (!(s.kx > 0.0) || !(s.ky > 0.0) || !(s.kz > 0.0)) {
    throw PreconditionError("wave problem: coefficients must be positive");
  }
  if (!(s.t_final > 0.0)) throw PreconditionError("wave problem: t_final must be positive");
}

double grid_h(std::size_t n) { return 1.0 / static_cast<double>(n + 1); }

template <class F>
Vector sample3(const WaveProblemSpec& s, F&& f) {
  const double hx = grid_h(s.nx), hy = grid_h(s.ny), hz = grid_h(s.nz);
  Vector out(static_cast<Eigen::Index>(s.dim()));
  Eigen::Index idx = 0;
  for (std::size_t k = 1; k <= s.nz; ++k) {
    for (std::size_t j = 1; j <= s.ny; ++j) {
      for (std::size_t i = 1; i <= s.nx; ++i) {
        out(idx++) = f(static_cast<double>(i) * hx, static_cast<double>(j) * hy,
                       static_cast<double>(k) * hz);
      }
    }
  }
  return out;
}

double sine_sum(double x, double y, double z, const WaveProblemSpec& s, bool weighted) {
  double acc = 0.0;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      for (int k = 1; k <= 3; ++k) {
        const double lam = kPi * kPi * (i * i * s.kx + j * j * s.ky + k * k * s.kz);
        const double mode = std::sin(i * kPi * x) * std::sin(j * kPi * y) * std::sin(k * kPi * z);
        acc += (weighted ? lam : 1.0) * mode;
      }
    }
  }
  return acc;
}

// Orthonormal, symmetric discrete sine matrix.
Matrix sine_matrix(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  const double scale = std::sqrt(2.0 / static_cast<double>(n + 1));
  Matrix s(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index p = 0; p < m; ++p) {
      s(i, p) = scale * std::sin(kPi * static_cast<double>((i + 1) * (p + 1)) /
                                 static_cast<double>(n + 1));
    }
  }
  return s;
}

Vector laplacian_eigenvalues(std::size_t n, double k) {
  const double h = grid_h(n);
  Vector mu(static_cast<Eigen::Index>(n));
  for (std::size_t p = 1; p <= n; ++p) {
    mu(static_cast<Eigen::Index>(p - 1)) = k / (h * h) * 2.0 * (1.0 - std::cos(p * kPi * h));
  }
  return mu;
}

Vector sine_transform3(const Vector& x, const Matrix& sx, const Matrix& sy, const Matrix& sz) {
  const Eigen::Index nx = sx.rows(), ny = sy.rows(), nz = sz.rows();
  Matrix a = sx * Eigen::Map<const Matrix>(x.data(), nx, ny * nz);
  for (Eigen::Index k = 0; k < nz; ++k) {
    a.middleCols(k * ny, ny) = a.middleCols(k * ny, ny) * sy;
  }
  Eigen::Map<Matrix> b(a.data(), nx * ny, nz);
  const Matrix c = b * sz;
  return Eigen::Map<const Vector>(c.data(), c.size());
}

}  // namespace

WaveProblemSpec WaveProblemSpec::isotropic(std::size_t n, double t) {
  WaveProblemSpec s;
  s.nx = s.ny = s.nz = n;
  s.t_final = t;
  return s;
}

WaveProblemSpec WaveProblemSpec::anisotropic(std::size_t n, double t) {
  WaveProblemSpec s;
  s.nx = s.ny = s.nz = n;
  s.kx = 1e4;
  s.ky = 1e2;
  s.kz = 1.0;
  s.initial = WaveInitial::AnisotropicSines;
  s.t_final = t;
  return s;
}

Vector wave_initial_position(const WaveProblemSpec& s) {
  if (s.initial == WaveInitial::IsotropicPoly) {
    return sample3(s, [](double x, double y, double z) {
      return std::pow(1.0 - x, 3) * (1.0 - y * y) * (1.0 - z * z);
    });
  }
  return sample3(s, [&](double x, double y, double z) { return sine_sum(x, y, z, s, false); });
}

Vector wave_initial_velocity(const WaveProblemSpec& s) {
  if (s.initial == WaveInitial::IsotropicPoly) {
    return Vector::Ones(static_cast<Eigen::Index>(s.dim()));
  }
  return sample3(s, [&](double x, double y, double z) { return sine_sum(x, y, z, s, true); });
}

SecondOrderIVP build_wave3d(const WaveProblemSpec& spec) {
  check_wave(spec);
  SecondOrderIVP ivp;
  ivp.op = std::make_shared<KroneckerSum3D>(dirichlet_laplacian_1d(spec.nx).scaled(spec.kx),
                                            dirichlet_laplacian_1d(spec.ny).scaled(spec.ky),
                                            dirichlet_laplacian_1d(spec.nz).scaled(spec.kz));
  ivp.u = wave_initial_position(spec);
  ivp.v = wave_initial_velocity(spec);
  ivp.g = Vector::Zero(ivp.u.size());
  ivp.t_final = spec.t_final;
  return ivp;
}

double transport_symmetric_part_min(const TransportProblemSpec& spec) {
  const double h = grid_h(spec.nx);
  const double mu_min = 2.0 / (h * h) * (1.0 - std::cos(kPi * h));
  return spec.c * spec.c * mu_min - spec.alpha * spec.alpha;
}

SecondOrderIVP build_transport(const TransportProblemSpec& spec) {
  if (spec.nx < 4) throw PreconditionError("transport problem: need at least 4 grid points");
  if (!(spec.c > 0.0) || !(spec.alpha > 0.0)) {
    throw PreconditionError("transport problem: c and alpha must be positive");
  }
  if (!(spec.t_final > 0.0)) throw PreconditionError("transport problem: t_final must be positive");

  const std::size_t n = spec.nx;
  const Tridiagonal lap = dirichlet_laplacian_1d(n);
  const Tridiagonal d = centered_difference_1d(n);
  const double c2 = spec.c * spec.c;
  const double ac2 = 2.0 * spec.alpha * spec.c;
  const double a2 = spec.alpha * spec.alpha;

  std::vector<Triplet> entries;
  entries.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::int64_t>(i);
    entries.push_back({r, r, c2 * lap.diag[i] - ac2 * d.diag[i] - a2});
    if (i > 0) entries.push_back({r, r - 1, c2 * lap.lower[i - 1] - ac2 * d.lower[i - 1]});
    if (i + 1 < n) entries.push_back({r, r + 1, c2 * lap.upper[i] - ac2 * d.upper[i]});
  }
  auto op = std::make_shared<SparseCSR>(n, std::move(entries), false);

  if (spec.strict) {
    double norm_inf = 0.0;
    const auto vals = op->values();
    const auto rp = op->row_ptr();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (auto p = rp[i]; p < rp[i + 1]; ++p) s += std::abs(vals[static_cast<std::size_t>(p)]);
      norm_inf = std::max(norm_inf, s);
    }
    const double lmin = transport_symmetric_part_min(spec);
    if (lmin < -1e-10 * norm_inf) {
      std::ostringstream msg;
      msg << "transport problem: symmetric part indefinite (smallest eigenvalue " << lmin << ")";
      throw PreconditionError(msg.str());
    }
  }

  const double h = grid_h(n);
  Vector u(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) * h;
    u(static_cast<Eigen::Index>(i)) = std::exp(-500.0 * (x - 0.5) * (x - 0.5));
  }
  // u0' by the same centered difference as D
  Vector du(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double left = i > 0 ? u(i - 1) : 0.0;
    const double right = i + 1 < u.size() ? u(i + 1) : 0.0;
    du(i) = (right - left) / (2.0 * h);
  }

  SecondOrderIVP ivp;
  ivp.op = op;
  ivp.u = u;
  ivp.v = spec.velocity == TransportVelocity::Printed ? Vector(du - spec.alpha * u)
                                                      : Vector(-spec.c * du - spec.alpha * u);
  ivp.g = Vector::Zero(u.size());
  ivp.t_final = spec.t_final;
  return ivp;
}

State spectral_reference_wave3d(const WaveProblemSpec& spec, double t) {
  check_wave(spec);
  if (spec.nx > kSpectralCap || spec.ny > kSpectralCap || spec.nz > kSpectralCap) {
    throw PreconditionError("spectral reference: grid exceeds " + std::to_string(kSpectralCap) +
                            " points per direction");
  }
  if (t < 0.0) throw PreconditionError("spectral reference: t must be nonnegative");
  const Matrix sx = sine_matrix(spec.nx), sy = sine_matrix(spec.ny), sz = sine_matrix(spec.nz);
  const Vector mx = laplacian_eigenvalues(spec.nx, spec.kx);
  const Vector my = laplacian_eigenvalues(spec.ny, spec.ky);
  const Vector mz = laplacian_eigenvalues(spec.nz, spec.kz);

  const Vector uh = sine_transform3(wave_initial_position(spec), sx, sy, sz);
  const Vector vh = sine_transform3(wave_initial_velocity(spec), sx, sy, sz);
  const TimeFunction fpsi{TimeFunKind::PsiPosition, t};
  const TimeFunction fsig{TimeFunKind::SigmaPosition, t};
  const TimeFunction fcos{TimeFunKind::Cosine, t};

  Vector yh(uh.size()), dyh(uh.size());
  Eigen::Index idx = 0;
  for (Eigen::Index k = 0; k < mz.size(); ++k) {
    for (Eigen::Index j = 0; j < my.size(); ++j) {
      for (Eigen::Index i = 0; i < mx.size(); ++i, ++idx) {
        const double lam = mx(i) + my(j) + mz(k);
        const double w = -lam * uh(idx);
        yh(idx) = uh(idx) + fpsi(lam) * w + fsig(lam) * vh(idx);
        dyh(idx) = fsig(lam) * w + fcos(lam) * vh(idx);
      }
    }
  }
  return {sine_transform3(yh, sx, sy, sz), sine_transform3(dyh, sx, sy, sz)};
}

State reference_solution(const SecondOrderIVP& ivp, ReferenceMethod method,
                         const WaveProblemSpec* wave) {
  ivp.validate();
  switch (method) {
    case ReferenceMethod::Dense:
      return exact_ivp_solution(ivp, ivp.t_final);
    case ReferenceMethod::Spectral: {
      if (wave == nullptr) {
        throw PreconditionError("spectral reference: requires a wave problem description");
      }
      return spectral_reference_wave3d(*wave, ivp.t_final);
    }
    case ReferenceMethod::TightTolerance: {
      SolverConfig cfg;
      cfg.tol = 1e-12;
      cfg.m_max = 60;
      const SolveReport r = rt_sequential(ivp, cfg);
      return {r.y, r.v_out};
    }
  }
  throw PreconditionError("reference_solution: unknown method");
}

namespace {

std::optional<std::size_t> parse_suffix(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  const std::string_view rest = name.substr(prefix.size());
  if (rest.empty()) return std::nullopt;
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
  if (ec != std::errc{} || ptr != rest.data() + rest.size() || n == 0) return std::nullopt;
  return n;
}

}  // namespace

std::optional<ProblemSpec> parse_preset(std::string_view name) {
  if (auto n = parse_suffix(name, "isotropic")) return WaveProblemSpec::isotropic(*n);
  if (auto n = parse_suffix(name, "anisotropic")) return WaveProblemSpec::anisotropic(*n);
  if (auto n = parse_suffix(name, "transport")) {
    TransportProblemSpec s;
    s.nx = *n;
    return s;
  }
  return std::nullopt;
}

SecondOrderIVP build_problem(const ProblemSpec& spec) {
  return std::visit(
      [](const auto& s) -> SecondOrderIVP {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, WaveProblemSpec>) {
          return build_wave3d(s);
        } else {
          return build_transport(s);
        }
      },
      spec);
}

std::string describe(const ProblemSpec& spec) {
  std::ostringstream os;
  if (const auto* w = std::get_if<WaveProblemSpec>(&spec)) {
    os << (w->initial == WaveInitial::IsotropicPoly ? "isotropic" : "anisotropic") << ' ' << w->nx
       << 'x' << w->ny << 'x' << w->nz << " t=" << w->t_final;
  } else {
    const auto& t = std::get<TransportProblemSpec>(spec);
    os << "transport " << t.nx << " t=" << t.t_final;
  }
  return os.str();
}

State preset_reference(const ProblemSpec& spec, const SecondOrderIVP& ivp) {
  if (const auto* w = std::get_if<WaveProblemSpec>(&spec)) {
    if (w->nx <= kSpectralCap && w->ny <= kSpectralCap && w->nz <= kSpectralCap) {
      return spectral_reference_wave3d(*w, ivp.t_final);
    }
  }
  return reference_solution(ivp, ReferenceMethod::TightTolerance);
}

}  // namespace trigkrylov
