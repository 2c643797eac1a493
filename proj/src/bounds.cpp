#include "trigkrylov/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "trigkrylov/krylov.hpp"
#include "trigkrylov/smallfun.hpp"

namespace trigkrylov {

namespace {

void check_bessel_range(int k, double t) {
  if (k < 0 || k > 400 || !(t >= 0.0) || t > 100.0) {
    throw PreconditionError("bessel_j: need 0 <= k <= 400 and 0 <= t <= 100 (got k=" +
                            std::to_string(k) + ", t=" + std::to_string(t) + ")");
  }
}

// Ascending series, used for t < 0.1.
double bessel_series(int k, double t) {
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  const double x = 0.5 * t;
  double term = std::exp(k * std::log(x) - std::lgamma(k + 1.0));
  double sum = term;
  for (int m = 1; m < 30; ++m) {
    term *= -x * x / (m * static_cast<double>(m + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double omega_hat(const Matrix& h) {
  if (h.rows() != h.cols()) throw DimensionError("omega_hat: matrix must be square");
  if (h.rows() == 0) return 0.0;
  const Matrix d = h - Matrix::Identity(h.rows(), h.cols());
  Eigen::JacobiSVD<Matrix> svd(d);
  return -0.5 * svd.singularValues()(0);
}

std::vector<double> bessel_j_sequence(int kmax, double t) {
  check_bessel_range(kmax, t);
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (t < 0.1) {
    for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = bessel_series(k, t);
    return out;
  }
  // Miller: start well above max(k, t) and recur downwards,
  // J_{n-1} = (2n/t) J_n - J_{n+1}, normalizing with J_0 + 2 sum J_{2i} = 1.
  const double top = std::max(static_cast<double>(kmax), t);
  int start = static_cast<int>(top + 40.0 + 12.0 * std::sqrt(top));
  if (start % 2 != 0) ++start;
  double jp1 = 0.0;
  double j = 1e-300;
  double norm = 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm1 = (2.0 * n / t) * j - jp1;
    jp1 = j;
    j = jm1;
    // j now holds J_{n-1}
    const int idx = n - 1;
    if (idx <= kmax) out[static_cast<std::size_t>(idx)] = j;
    if (idx % 2 == 0 && idx > 0) norm += 2.0 * j;
    if (idx <= kmax && idx + 1 <= kmax) out[static_cast<std::size_t>(idx + 1)] = jp1;
    if (std::abs(j) > 1e250) {
      const double s = 1e-250;
      j *= s;
      jp1 *= s;
      norm *= s;
      for (int i = idx; i <= kmax; ++i) out[static_cast<std::size_t>(i)] *= s;
    }
  }
  norm += j;  // J_0
  for (double& v : out) v /= norm;
  return out;
}

double bessel_j(int k, double t) {
  check_bessel_range(k, t);
  if (t < 0.1) return bessel_series(k, t);
  return bessel_j_sequence(k, t)[static_cast<std::size_t>(k)];
}

int chebyshev_truncation(double t) {
  const int kmax = 400;
  const auto j = bessel_j_sequence(kmax, t);
  for (int l = 0; 2 * l + 2 <= kmax; ++l) {
    if (std::abs(j[static_cast<std::size_t>(2 * l + 1)]) < 1e-16 &&
        (l + 1) * std::abs(j[static_cast<std::size_t>(2 * l + 2)]) < 1e-16) {
      return l;
    }
  }
  return (kmax - 2) / 2;
}

double cheb_coeff_sigma(int k, double t, std::optional<int> truncation) {
  if (k < 0) throw PreconditionError("cheb_coeff_sigma: k must be nonnegative");
  const int l_max = std::max(truncation.value_or(chebyshev_truncation(t)), k);
  const int need = 2 * l_max + 1;
  const auto j = bessel_j_sequence(std::min(need, 400), t);
  double s = 0.0;
  for (int l = l_max; l >= k; --l) {
    if (2 * l + 1 <= 400) s += j[static_cast<std::size_t>(2 * l + 1)];
  }
  return 4.0 * (k % 2 == 0 ? 1.0 : -1.0) * s;
}

double cheb_coeff_psi(int k, double t, std::optional<int> truncation) {
  if (k < 0) throw PreconditionError("cheb_coeff_psi: k must be nonnegative");
  const int l_max = truncation.value_or(chebyshev_truncation(t));
  const int need = std::min(2 * (k + l_max + 1), 400);
  const auto j = bessel_j_sequence(need, t);
  double s = 0.0;
  for (int l = l_max; l >= 0; --l) {
    const int idx = 2 * (k + l + 1);
    if (idx <= 400) s += (l + 1) * j[static_cast<std::size_t>(idx)];
  }
  return 8.0 * (k % 2 == 0 ? 1.0 : -1.0) * s;
}

double bound_prop22(const BoundInput& in) {
  if (in.t < 0.0) throw PreconditionError("bound_prop22: t must be nonnegative");
  const double omega = std::min(in.omega_psi, in.omega_sigma);
  return in.t * scalar_fun(ScalarFunKind::Phi, -in.t * omega) *
         (in.h_psi * in.beta_psi + in.h_sigma * in.beta_sigma);
}

Prop23Bound bound_prop23(const BoundInput& in) {
  if (in.spectrum == SpectrumClass::General) {
    throw PreconditionError("bound_prop23: requires a symmetric positive definite operator");
  }
  if (!(in.lambda_min_psi > 0.0) || !(in.lambda_min_sigma > 0.0)) {
    throw PreconditionError("bound_prop23: lambda_min must be positive");
  }
  if (in.t < 0.0) throw PreconditionError("bound_prop23: t must be nonnegative");
  const double t = in.t;
  const double lp = in.lambda_min_psi;
  const double ls = in.lambda_min_sigma;
  const double hp = in.h_psi * in.beta_psi;
  const double hs = in.h_sigma * in.beta_sigma;
  const double sig = hs * std::min(t, 1.0 / std::sqrt(ls));
  Prop23Bound b;
  b.simple = (hp / lp + hs) * t;
  b.tight = hp * std::min({0.5 * t * t, t / lp, 2.0 / lp}) + sig;
  b.tight_corrected = hp * std::min({0.5 * t * t, t / std::sqrt(lp), 2.0 / lp}) + sig;
  return b;
}

namespace {

void check_p_premise(int m, double t, const char* name) {
  if (m < 2 || !(t >= 0.0) || t > 1.0) {
    throw PreconditionError(std::string(name) + ": requires m >= 2 and 0 <= t <= 1");
  }
}

}  // namespace

double bound_p3(int m, double t) {
  check_p_premise(m, t, "bound_p3");
  const int p = 2 * m - 1;
  return 16.0 * std::exp(p * std::log(0.5 * t) - std::lgamma(p + 1.0));
}

double bound_p4(int m, double t) {
  check_p_premise(m, t, "bound_p4");
  const int p = 2 * m;
  return 128.0 / 15.0 * std::exp(p * std::log(0.5 * t) - std::lgamma(p + 1.0));
}

namespace {

struct BranchData {
  double beta = 0.0;
  double h = 0.0;
  double omega = 0.0;
  double lambda_min = 0.0;
  double max_res = 0.0;
};

BranchData run_branch(const LinearOperator& op, const Vector& start, int m, double t,
                      ProjectedKind kind, bool spd, int samples) {
  BranchData b;
  if (start.norm() == 0.0) {
    b.lambda_min = 1.0;
    return b;
  }
  const auto mm = std::min<Eigen::Index>(m, static_cast<Eigen::Index>(op.dim()));
  const KrylovDecomposition d = krylov_build(op, start, mm);
  const ResidualCurve curve(d, kind);
  b.beta = d.beta;
  b.h = d.h_next;
  b.omega = omega_hat(d.square());
  if (spd) b.lambda_min = curve.cache().lambda_min();
  for (int i = 1; i <= samples; ++i) {
    b.max_res = std::max(b.max_res, curve(t * static_cast<double>(i) / samples));
  }
  return b;
}

bool exceeds(double measured, double bound, double scale) {
  return measured > bound * (1.0 + 1e-9) + 1e-14 * scale;
}

}  // namespace

BoundCheck check_bounds(const LinearOperator& op, const Vector& w, const Vector& v, int m,
                        double t, SpectrumClass spectrum, int samples) {
  if (m < 1) throw PreconditionError("check_bounds: m must be positive");
  if (t < 0.0) throw PreconditionError("check_bounds: t must be nonnegative");
  const bool spd = spectrum != SpectrumClass::General;
  if (spd && !op.is_symmetric()) {
    throw PreconditionError("check_bounds: symmetric bounds need a symmetric operator");
  }
  const BranchData p = run_branch(op, w, m, t, ProjectedKind::Psi, spd, samples);
  const BranchData s = run_branch(op, v, m, t, ProjectedKind::Sigma, spd, samples);

  BoundCheck out;
  BoundInput& in = out.input;
  in.m = m;
  in.t = t;
  in.h_psi = p.h;
  in.beta_psi = p.beta;
  in.h_sigma = s.h;
  in.beta_sigma = s.beta;
  in.omega_psi = p.omega;
  in.omega_sigma = s.omega;
  in.lambda_min_psi = p.lambda_min;
  in.lambda_min_sigma = s.lambda_min;
  in.spectrum = spectrum;
  out.res_psi = p.max_res;
  out.res_sigma = s.max_res;

  const double scale = p.beta + s.beta;
  const double total = p.max_res + s.max_res;
  std::string viol;
  auto flag = [&](const char* name) {
    if (!viol.empty()) viol += ' ';
    viol += name;
  };

  out.prop22 = bound_prop22(in);
  if (exceeds(total, out.prop22, scale)) flag("prop22");
  if (spd && in.lambda_min_psi > 0.0 && in.lambda_min_sigma > 0.0) {
    out.prop23 = bound_prop23(in);
    if (exceeds(total, out.prop23->simple, scale)) flag("prop23_simple");
    if (exceeds(total, out.prop23->tight, scale)) flag("prop23_tight");
  }
  if (spectrum == SpectrumClass::UnitInterval && m >= 2 && t <= 1.0) {
    out.p3 = bound_p3(m, t);
    out.p4 = bound_p4(m, t);
    if (s.beta > 0.0 && exceeds(s.max_res / s.beta, *out.p3, 1.0)) flag("p3");
    if (p.beta > 0.0 && exceeds(p.max_res / p.beta, *out.p4, 1.0)) flag("p4");
  }
  out.violations = viol;
  return out;
}

}  // namespace trigkrylov
