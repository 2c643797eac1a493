#include "trigkrylov/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace trigkrylov {

void SolverConfig::validate() const {
  if (m_max < 2) throw PreconditionError("config: m_max must be at least 2");
  if (!(tol > 0.0)) throw PreconditionError("config: tol must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("config: alpha must lie in (0, 1)");
  if (check_interval < 1) throw PreconditionError("config: check_interval must be positive");
  if (max_iterations < 0) throw PreconditionError("config: max_iterations must be nonnegative");
  if (per_basis_cap && *per_basis_cap < 1) {
    throw PreconditionError("config: per-basis cap must be positive");
  }
  if (abs_threshold && !(*abs_threshold > 0.0)) {
    throw PreconditionError("config: absolute threshold must be positive");
  }
}

std::optional<SolverKind> parse_solver(std::string_view name) {
  if (name == "rt-sim") return SolverKind::RtSimultaneous;
  if (name == "rt-seq") return SolverKind::RtSequential;
  if (name == "gautschi") return SolverKind::Gautschi;
  if (name == "two-pass") return SolverKind::TwoPassLanczos;
  if (name == "first-order") return SolverKind::FirstOrderBlock;
  return std::nullopt;
}

std::string_view solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::RtSimultaneous:
      return "rt-sim";
    case SolverKind::RtSequential:
      return "rt-seq";
    case SolverKind::Gautschi:
      return "gautschi";
    case SolverKind::TwoPassLanczos:
      return "two-pass";
    case SolverKind::FirstOrderBlock:
      return "first-order";
  }
  return "?";
}

namespace {

// Absolute residual thresholds for a given pair of inflow norms.
struct Thresholds {
  double psi = 0.0;
  double sigma = 0.0;
  double combined = 0.0;
};

Thresholds split_thresholds(double nw, double nv, const SolverConfig& cfg) {
  Thresholds t;
  if (cfg.abs_threshold) {
    t.psi = t.sigma = t.combined = *cfg.abs_threshold;
  } else if (nv == 0.0) {
    t.psi = t.combined = cfg.tol * nw;
  } else if (nw == 0.0) {
    t.sigma = t.combined = cfg.tol * nv;
  } else {
    t.psi = t.sigma = 0.5 * cfg.tol * (nw + nv);
    t.combined = cfg.tol * (nw + nv);
  }
  return t;
}

bool per_cycle(const SolverConfig& cfg) {
  return cfg.scope == ThresholdScope::PerCycle && !cfg.abs_threshold;
}

struct Branch {
  std::unique_ptr<KrylovBuilder> builder;
  std::optional<ResidualCurve> curve;
  bool converged = false;

  void refresh(ProjectedKind kind) {
    curve.emplace(builder->factorize(), kind, builder->beta(), builder->h_next());
  }
  [[nodiscard]] double operator()(double t) const { return curve ? (*curve)(t) : 0.0; }
  [[nodiscard]] Vector coefficients(TimeFunKind f, double t) const {
    return curve->beta() * curve->cache().first_column({f, t});
  }
  [[nodiscard]] Vector action(TimeFunKind f, double t) const {
    return builder->combine(coefficients(f, t));
  }
};

// Grows a Krylov space one vector at a time until the coarse residual check on
// [0, horizon] passes or the capacity is reached.
Branch run_branch(const LinearOperator& op, const Vector& w, ProjectedKind kind, Eigen::Index cap,
                  double horizon, double thr, KrylovOptions opts) {
  Branch b;
  b.builder = std::make_unique<KrylovBuilder>(op, w, cap, opts);
  while (b.builder->step()) {
    b.refresh(kind);
    if (coarse_residual_check(*b.curve, horizon, thr)) {
      b.converged = true;
      break;
    }
  }
  return b;
}

Eigen::Index krylov_cap(int requested, const LinearOperator& op) {
  return std::min<Eigen::Index>(std::max(requested, 1), static_cast<Eigen::Index>(op.dim()));
}

std::string branch_name(ProjectedKind k) {
  switch (k) {
    case ProjectedKind::Psi:
      return "psi";
    case ProjectedKind::Sigma:
      return "sigma";
    case ProjectedKind::Phi:
      return "phi";
  }
  return "?";
}

template <ResidualFunction F>
void log_residual(SolveReport& r, int cycle, const std::string& branch, Eigen::Index m,
                  double t0, double t1, const F& curve) {
  r.residual_log.push_back({cycle, branch, m, t0, t1, coarse_residual_max(curve, t1 - t0)});
}

Vector residual_rhs(const LinearOperator& op, const Vector& y, const Vector& g) {
  return g - op.apply(y);
}

double advance(double t_rem, double delta) { return delta >= t_rem ? 0.0 : t_rem - delta; }

}  // namespace

SolveReport rt_sequential(const SecondOrderIVP& ivp, const SolverConfig& cfg) {
  cfg.validate();
  ivp.validate();
  const LinearOperator& op = *ivp.op;
  const auto start = op.matvec_count();
  const Eigen::Index cap = krylov_cap(cfg.m_max, op);
  const KrylovOptions opts{KrylovMode::Auto, cfg.reorth};

  SolveReport rep;
  Vector y = ivp.u;
  Vector v = ivp.v;
  Vector gt = residual_rhs(op, y, ivp.g);
  const Thresholds thr0 = split_thresholds(gt.norm(), v.norm(), cfg);
  rep.threshold = thr0.combined;

  double t_rem = ivp.t_final;
  double t_now = 0.0;
  while (t_rem > 0.0) {
    ++rep.cycles;
    if (rep.cycles > 1) gt = residual_rhs(op, y, ivp.g);
    const double nw = gt.norm();
    const double nv = v.norm();
    if (nw == 0.0 && nv == 0.0) break;
    const Thresholds thr = per_cycle(cfg) ? split_thresholds(nw, nv, cfg) : thr0;

    double delta = t_rem;
    Vector y_psi = Vector::Zero(y.size());
    Vector v_psi = Vector::Zero(y.size());
    std::optional<ResidualCurve> psi_curve;
    KrylovDecomposition psi_decomp;
    if (nw > 0.0) {
      Branch b = run_branch(op, gt, ProjectedKind::Psi, cap, t_rem, thr.psi, opts);
      if (!b.converged) delta = find_largest_admissible_step(b, t_rem, thr.psi);
      log_residual(rep, rep.cycles, "psi", b.builder->m(), 0.0, delta, b);
      y_psi = b.action(TimeFunKind::PsiPosition, delta);
      v_psi = b.action(TimeFunKind::SigmaPosition, delta);
      psi_curve = b.curve;
      psi_decomp = b.builder->decomposition(false);
    }

    Vector y_sig = Vector::Zero(y.size());
    Vector v_sig = Vector::Zero(y.size());
    if (nv > 0.0) {
      Branch b = run_branch(op, v, ProjectedKind::Sigma, cap, delta, thr.sigma, opts);
      if (!b.converged) {
        const double ds = find_largest_admissible_step(b, delta, thr.sigma);
        if (ds < delta) {
          delta = ds;
          if (psi_curve) {
            ++rep.repair_events;
            const Vector cy = psi_curve->beta() *
                              psi_curve->cache().first_column({TimeFunKind::PsiPosition, delta});
            const Vector cv = psi_curve->beta() *
                              psi_curve->cache().first_column({TimeFunKind::SigmaPosition, delta});
            y_psi.setZero();
            v_psi.setZero();
            regenerate_basis(op, gt, psi_decomp, [&](Eigen::Index j, const Vector& vj) {
              y_psi += cy[j] * vj;
              v_psi += cv[j] * vj;
            });
          }
        }
      }
      log_residual(rep, rep.cycles, "sigma", b.builder->m(), 0.0, delta, b);
      y_sig = b.action(TimeFunKind::SigmaPosition, delta);
      v_sig = b.action(TimeFunKind::Cosine, delta);
    }

    y += y_psi + y_sig;
    v = v_psi + v_sig;
    for (auto it = rep.residual_log.end() - ((nw > 0.0) + (nv > 0.0)); it != rep.residual_log.end();
         ++it) {
      it->t0 += t_now;
      it->t1 += t_now;
    }
    rep.step_sizes.push_back(delta);
    t_now += delta;
    t_rem = advance(t_rem, delta);
  }

  rep.y = std::move(y);
  rep.v_out = std::move(v);
  rep.restarts = std::max(rep.cycles - 1, 0);
  rep.matvecs = op.matvec_count() - start;
  return rep;
}

SolveReport rt_simultaneous(const SecondOrderIVP& ivp, const SolverConfig& cfg) {
  cfg.validate();
  ivp.validate();
  const LinearOperator& op = *ivp.op;
  const auto start = op.matvec_count();
  const Eigen::Index cap = krylov_cap(cfg.basis_cap(), op);
  const KrylovOptions opts{KrylovMode::Auto, cfg.reorth};

  SolveReport rep;
  Vector y = ivp.u;
  Vector v = ivp.v;
  Vector gt = residual_rhs(op, y, ivp.g);
  Thresholds thr = split_thresholds(gt.norm(), v.norm(), cfg);
  rep.threshold = thr.combined;

  double t_rem = ivp.t_final;
  double t_now = 0.0;
  while (t_rem > 0.0) {
    ++rep.cycles;
    if (rep.cycles > 1) gt = residual_rhs(op, y, ivp.g);
    const bool has_psi = gt.norm() > 0.0;
    const bool has_sig = v.norm() > 0.0;
    if (!has_psi && !has_sig) break;
    if (per_cycle(cfg)) thr = split_thresholds(gt.norm(), v.norm(), cfg);

    Branch bp, bs;
    if (has_psi) bp.builder = std::make_unique<KrylovBuilder>(op, gt, cap, opts);
    if (has_sig) bs.builder = std::make_unique<KrylovBuilder>(op, v, cap, opts);
    auto combined = [&](double s) { return bp(s) + bs(s); };

    bool converged = false;
    Eigen::Index m = 0;
    for (;;) {
      bool stepped = false;
      if (bp.builder && bp.builder->step()) {
        bp.refresh(ProjectedKind::Psi);
        stepped = true;
      }
      if (bs.builder && bs.builder->step()) {
        bs.refresh(ProjectedKind::Sigma);
        stepped = true;
      }
      if (!stepped) break;
      ++m;
      if (coarse_residual_check(combined, t_rem, thr.combined)) {
        converged = true;
        break;
      }
    }
    const double delta =
        converged ? t_rem : find_largest_admissible_step(combined, t_rem, thr.combined);
    log_residual(rep, rep.cycles, "combined", m, 0.0, delta, combined);
    rep.residual_log.back().t0 += t_now;
    rep.residual_log.back().t1 += t_now;

    Vector v_new = Vector::Zero(v.size());
    if (has_psi) {
      y += bp.action(TimeFunKind::PsiPosition, delta);
      v_new += bp.action(TimeFunKind::SigmaPosition, delta);
    }
    if (has_sig) {
      y += bs.action(TimeFunKind::SigmaPosition, delta);
      v_new += bs.action(TimeFunKind::Cosine, delta);
    }
    v = std::move(v_new);
    rep.step_sizes.push_back(delta);
    t_now += delta;
    t_rem = advance(t_rem, delta);
  }

  rep.y = std::move(y);
  rep.v_out = std::move(v);
  rep.restarts = std::max(rep.cycles - 1, 0);
  rep.matvecs = op.matvec_count() - start;
  return rep;
}

GautschiIncrement gautschi_increment(const OperatorPtr& op, const Vector& w, double delta,
                                     double thr, const SolverConfig& cfg) {
  if (!(delta > 0.0)) throw PreconditionError("gautschi_increment: delta must be positive");
  GautschiIncrement inc;
  const Eigen::Index cap = krylov_cap(cfg.m_max, *op);
  Branch b = run_branch(*op, w, ProjectedKind::Psi, cap, delta, thr, {KrylovMode::Auto, cfg.reorth});
  inc.m = b.builder->m();
  inc.max_residual = coarse_residual_max(b, delta);
  const double dt = b.converged ? delta : find_largest_admissible_step(b, delta, thr);
  if (dt >= delta) {
    inc.x = b.action(TimeFunKind::PsiPosition, delta) / delta;
    return inc;
  }
  // Bridge: continue zeta'' = -A zeta + w from its exact state at dt up to delta.
  inc.repaired = true;
  SecondOrderIVP bridge;
  bridge.op = op;
  bridge.u = b.action(TimeFunKind::PsiPosition, dt);
  bridge.v = b.action(TimeFunKind::SigmaPosition, dt);
  bridge.g = w;
  bridge.t_final = delta - dt;
  b = Branch{};
  SolverConfig bc = cfg;
  bc.abs_threshold = thr;
  inc.x = rt_sequential(bridge, bc).y / delta;
  return inc;
}

SolveReport gautschi(const SecondOrderIVP& ivp, const SolverConfig& cfg) {
  cfg.validate();
  ivp.validate();
  const LinearOperator& op = *ivp.op;
  const auto start = op.matvec_count();
  const KrylovOptions opts{KrylovMode::Auto, cfg.reorth};
  const Eigen::Index cap0 =
      krylov_cap(static_cast<int>(std::floor(cfg.alpha * cfg.m_max)), op);
  const double t = ivp.t_final;

  SolveReport rep;
  rep.v_out_averaged = true;
  Vector y = ivp.u;
  Vector w = residual_rhs(op, y, ivp.g);
  const double nw = w.norm();
  const double nv = ivp.v.norm();
  const Thresholds split = split_thresholds(nw, nv, cfg);
  const double thr = (nv == 0.0) ? split.psi : (nw == 0.0 ? split.sigma : split.psi);
  rep.threshold = thr;
  if (nw == 0.0 && nv == 0.0) {
    rep.y = y;
    rep.v_out = ivp.v;
    rep.matvecs = op.matvec_count() - start;
    return rep;
  }

  // Initial step size from the sigma run, validated by the first psi run.
  double delta = t;
  Branch bs;
  if (nv > 0.0) {
    bs = run_branch(op, ivp.v, ProjectedKind::Sigma, cap0, t, thr, opts);
    if (!bs.converged) delta = find_largest_admissible_step(bs, t, thr);
    log_residual(rep, 0, "sigma", bs.builder->m(), 0.0, delta, bs);
  }
  Branch bp;
  if (nw > 0.0) {
    bp = run_branch(op, w, ProjectedKind::Psi, cap0, delta, thr, opts);
    if (!bp.converged) {
      const double dp = find_largest_admissible_step(bp, delta, thr);
      if (dp < delta) {
        delta = dp;
        ++rep.repair_events;
      }
    }
  }
  int steps = 0;
  for (;;) {
    steps = static_cast<int>(std::ceil(t / delta - 1e-9));
    steps = std::max(steps, 1);
    delta = t / steps;
    if (!bp.builder || coarse_residual_check(bp, delta, thr)) break;
    delta = find_largest_admissible_step(bp, delta, thr);
  }
  if (bp.builder) log_residual(rep, 0, "psi", bp.builder->m(), 0.0, delta, bp);

  Vector vk = Vector::Zero(y.size());
  if (bs.builder) vk = bs.action(TimeFunKind::SigmaPosition, delta) / delta;
  Vector x = Vector::Zero(y.size());
  if (bp.builder) x = bp.action(TimeFunKind::PsiPosition, delta) / delta;
  bs = Branch{};
  bp = Branch{};

  const double thr0 = thr;
  for (int k = 0; k < steps; ++k) {
    ++rep.cycles;
    const Vector v_half = vk + x;
    y += delta * v_half;
    rep.step_sizes.push_back(delta);
    if (k + 1 == steps && !cfg.final_velocity) {
      vk = v_half;
      break;
    }
    w = residual_rhs(op, y, ivp.g);
    x.setZero();
    if (w.norm() > 0.0) {
      const double thr =
          (per_cycle(cfg) && nw > 0.0) ? thr0 / nw * w.norm() : thr0;
      GautschiIncrement inc = gautschi_increment(ivp.op, w, delta, thr, cfg);
      const double t0 = (k + 1) * delta;
      rep.residual_log.push_back({rep.cycles, "psi", inc.m, t0, t0 + delta, inc.max_residual});
      if (inc.repaired) ++rep.repair_events;
      x = std::move(inc.x);
    }
    vk = v_half + x;
  }

  rep.y = std::move(y);
  rep.v_out = std::move(vk);
  rep.restarts = 0;
  rep.matvecs = op.matvec_count() - start;
  return rep;
}

SolveReport two_pass_lanczos(const SecondOrderIVP& ivp, const SolverConfig& cfg) {
  cfg.validate();
  ivp.validate();
  const LinearOperator& op = *ivp.op;
  if (!op.is_symmetric()) throw PreconditionError("two-pass Lanczos: operator not symmetric");
  const auto start = op.matvec_count();
  const int iter_cap = cfg.max_iterations > 0 ? cfg.max_iterations : 10 * cfg.m_max * 20;
  const Eigen::Index cap = krylov_cap(iter_cap, op);
  const double t = ivp.t_final;

  SolveReport rep;
  rep.cycles = 1;
  const Vector w = residual_rhs(op, ivp.u, ivp.g);
  const Thresholds thr = split_thresholds(w.norm(), ivp.v.norm(), cfg);
  rep.threshold = thr.combined;
  Vector y = ivp.u;
  Vector dy = Vector::Zero(y.size());

  auto run = [&](const Vector& start_vec, ProjectedKind kind, double branch_thr,
                 TimeFunKind fy, TimeFunKind fv) {
    KrylovBuilder b(op, start_vec, cap, {KrylovMode::LanczosThreeTerm, false});
    std::optional<ResidualCurve> curve;
    bool converged = false;
    while (b.step()) {
      if (b.m() % cfg.check_interval != 0 && !b.breakdown() && b.m() < b.capacity()) continue;
      curve.emplace(b.factorize(), kind, b.beta(), b.h_next());
      log_residual(rep, 1, branch_name(kind), b.m(), 0.0, t, *curve);
      if (coarse_residual_check(*curve, t, branch_thr)) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("two-pass Lanczos: no convergence within " + std::to_string(cap) +
                             " iterations (last residual " +
                             std::to_string(rep.residual_log.back().max_residual) + ")");
    }
    const Vector cy = b.beta() * curve->cache().first_column({fy, t});
    const Vector cv = b.beta() * curve->cache().first_column({fv, t});
    const KrylovDecomposition d = b.decomposition(false);
    regenerate_basis(op, start_vec, d, [&](Eigen::Index j, const Vector& vj) {
      y += cy[j] * vj;
      dy += cv[j] * vj;
    });
  };

  if (w.norm() > 0.0) {
    run(w, ProjectedKind::Psi, thr.psi, TimeFunKind::PsiPosition, TimeFunKind::SigmaPosition);
  }
  if (ivp.v.norm() > 0.0) {
    run(ivp.v, ProjectedKind::Sigma, thr.sigma, TimeFunKind::SigmaPosition, TimeFunKind::Cosine);
  }
  rep.step_sizes.push_back(t);
  rep.y = std::move(y);
  rep.v_out = std::move(dy);
  rep.matvecs = op.matvec_count() - start;
  return rep;
}

SolveReport rt_first_order_block(const SecondOrderIVP& ivp, const SolverConfig& cfg) {
  cfg.validate();
  ivp.validate();
  const LinearOperator& inner = *ivp.op;
  const auto start = inner.matvec_count();
  const BlockFirstOrderOperator block(ivp.op);
  const Eigen::Index n = static_cast<Eigen::Index>(inner.dim());
  const Eigen::Index cap = krylov_cap(cfg.basis_cap(), block);
  const KrylovOptions opts{KrylovMode::FullArnoldi, cfg.reorth};

  SolveReport rep;
  Vector state(2 * n);
  state << ivp.u, ivp.v;
  Vector ghat = Vector::Zero(2 * n);
  ghat.tail(n) = ivp.g;

  Vector r = ghat - block.apply(state);
  const double thr = cfg.abs_threshold.value_or(cfg.tol * r.norm());
  rep.threshold = thr;

  double t_rem = ivp.t_final;
  double t_now = 0.0;
  while (t_rem > 0.0) {
    ++rep.cycles;
    if (rep.cycles > 1) r = ghat - block.apply(state);
    if (r.norm() == 0.0) break;
    Branch b = run_branch(block, r, ProjectedKind::Phi, cap, t_rem, thr, opts);
    const double delta = b.converged ? t_rem : find_largest_admissible_step(b, t_rem, thr);
    log_residual(rep, rep.cycles, "phi", b.builder->m(), t_now, t_now + delta, b);
    state += b.action(TimeFunKind::PhiPosition, delta);
    rep.step_sizes.push_back(delta);
    t_now += delta;
    t_rem = advance(t_rem, delta);
  }

  rep.y = state.head(n);
  rep.v_out = state.tail(n);
  rep.restarts = std::max(rep.cycles - 1, 0);
  rep.matvecs = inner.matvec_count() - start;
  return rep;
}

SolveReport solve(SolverKind kind, const SecondOrderIVP& ivp, const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::RtSimultaneous:
      return rt_simultaneous(ivp, cfg);
    case SolverKind::RtSequential:
      return rt_sequential(ivp, cfg);
    case SolverKind::Gautschi:
      return gautschi(ivp, cfg);
    case SolverKind::TwoPassLanczos:
      return two_pass_lanczos(ivp, cfg);
    case SolverKind::FirstOrderBlock:
      return rt_first_order_block(ivp, cfg);
  }
  throw PreconditionError("solve: unknown solver");
}

std::vector<State> gautschi_dense(const Matrix& a, const Vector& u, const Vector& v,
                                  const Vector& g, double delta, int steps) {
  if (!(delta > 0.0) || steps < 0) throw PreconditionError("gautschi_dense: bad step data");
  const DenseMatrixFunctions f(a);
  const TimeFunction psi{TimeFunKind::PsiPosition, delta};
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Vector y = u;
  Vector vk = f.apply({TimeFunKind::SigmaPosition, delta}, v) / delta;
  Vector x = f.apply(psi, g - a * y) / delta;
  out.push_back({y, vk});
  for (int k = 0; k < steps; ++k) {
    const Vector v_half = vk + x;
    y += delta * v_half;
    x = f.apply(psi, g - a * y) / delta;
    vk = v_half + x;
    out.push_back({y, vk});
  }
  return out;
}

}  // namespace trigkrylov
