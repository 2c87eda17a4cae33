#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xrda/problem.hpp"
#include "xrda/reference.hpp"
#include "xrda/schedule.hpp"

namespace xrda {

/// Threshold below which a coordinate counts as zero in nnz.
inline constexpr double kNnzThreshold = 1e-12;

/// Relative slack allowed on t_n <= gamma_n before it counts as a violation.
inline constexpr double kAveragingSlack = 1e-12;

/// Iteration state, stored natively in dual coordinates.
///
/// At index n the state holds x_n and the quantities needed to form x_{n+1}:
/// x~_{n-1/2}, x~_n, the backward weight gamma_n and the subgradient h_n of G
/// at x_n extracted from the previous prox. The running sums include
/// i = 1..n: S_n, sum s_i x_i, sum s_i^2 / alpha_i and min_i f(x_i).
/// dual_accum holds sum_{i<n} (s_i g_i + t_i h_i).
template <typename Scalar>
struct SolverState {
  Eigen::Index n = 1;
  DualPoint<Scalar> x_tilde_half;
  DualPoint<Scalar> x_tilde;
  DualPoint<Scalar> x_tilde_1;
  PrimalPoint<Scalar> x;
  PrimalPoint<Scalar> x_1;
  DualPoint<Scalar> h;
  Scalar gamma = Scalar(0);
  Scalar alpha = Scalar(1);
  /// gamma_n / alpha_n, the prox step that produced x_n.
  Scalar backward_step = Scalar(0);
  Scalar S = Scalar(0);
  Vector<Scalar> weighted_sum;
  Scalar f_x = Scalar(0);
  Scalar best_f = std::numeric_limits<Scalar>::infinity();
  PrimalPoint<Scalar> best_x;
  Scalar bound_acc = Scalar(0);
  DualPoint<Scalar> dual_accum;
  /// Cleared when an unsafe run leaves the schedule's feasible set.
  bool feasible = true;
};

/// Where the forward-step subgradients come from.
class GradientMode {
 public:
  static GradientMode exact() { return GradientMode(nullptr); }
  static GradientMode stochastic(RngState& rng) { return GradientMode(&rng); }

  [[nodiscard]] bool is_exact() const { return rng_ == nullptr; }

  template <typename Scalar>
  DualPoint<Scalar> draw(const CompositeProblem<Scalar>& p, const PrimalPoint<Scalar>& x) const {
    if (rng_ == nullptr) return loss_subgradient(p, x);
    return sample_subgradient(p, x, *rng_).value;
  }

 private:
  explicit GradientMode(RngState* rng) : rng_(rng) {}
  RngState* rng_;
};

struct StepOptions {
  /// Halt on schedule violations. When false the run continues and the
  /// state is marked infeasible.
  bool enforce_schedule = true;
};

template <typename Scalar>
SolverState<Scalar> init(const CompositeProblem<Scalar>& p, const Schedule<Scalar>& sched,
                         const std::optional<PrimalPoint<Scalar>>& x1 = std::nullopt) {
  sched.validate();
  require_prox_supported(p.mirror.kind, p.G.kind());
  const Scalar alpha1 = sched.alpha(1);
  if (!(alpha1 > Scalar(0))) throw ConfigError("alpha_1 must be positive");

  const PrimalPoint<Scalar> canonical = canonical_argmin(p.G, p.dim());
  PrimalPoint<Scalar> start = canonical;
  if (x1) {
    require_same_dim(x1->dim(), p.dim(), "init: x1");
    if (!(reg_value(p.G, *x1) <= reg_value(p.G, canonical) + Scalar(1e-9))) {
      throw ConfigError("init: x1 is not a minimizer of G");
    }
    start = *x1;
  }

  SolverState<Scalar> st;
  try {
    st.x_tilde_1 = phi_grad(p.mirror, start);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("init: x1 lies outside the mirror domain (") + e.what() +
                      "); under the entropy mirror use the simplex default start");
  }
  st.n = 1;
  st.x_1 = start;
  st.x = start;
  st.x_tilde = st.x_tilde_1;
  st.x_tilde_half = st.x_tilde_1;
  st.h = DualPoint<Scalar>::zero(p.dim());
  st.dual_accum = DualPoint<Scalar>::zero(p.dim());
  st.gamma = Scalar(0);
  st.alpha = alpha1;
  st.backward_step = Scalar(0);
  const Scalar s1 = sched.s(1);
  st.S = s1;
  st.weighted_sum = s1 * start.coords();
  st.bound_acc = s1 * s1 / alpha1;
  st.f_x = objective(p, start);
  st.best_f = st.f_x;
  st.best_x = start;
  return st;
}

namespace detail {

template <typename Scalar>
Scalar averaging_weight(const SolverState<Scalar>& st, const Schedule<Scalar>& sched) {
  const Scalar s_prev = st.n > 1 ? sched.s(st.n - 1) : Scalar(0);
  return sched.t(AveragingContext<Scalar>{st.n, st.gamma, sched.s(st.n), s_prev, st.x});
}

template <typename Scalar>
void violation(SolverState<Scalar>& st, const StepOptions& opts, const std::string& what) {
  if (opts.enforce_schedule) {
    throw ScheduleViolation("schedule violation at n = " + std::to_string(st.n) + ": " + what);
  }
  st.feasible = false;
}

}  // namespace detail

/// gamma_{n+1} / alpha_{n+1}: the prox step the next iteration will use.
template <typename Scalar>
Scalar next_backward_step(const SolverState<Scalar>& st, const Schedule<Scalar>& sched) {
  const Scalar t = std::min(detail::averaging_weight(st, sched), st.gamma);
  return ((st.gamma - t) + sched.s(st.n)) / sched.alpha(st.n + 1);
}

/// One XRDA iteration, n -> n+1:
///   x~'_n       = (1 - mu_n) x~_{n-1/2} + mu_n x~_n,            mu_n = t_n / gamma_n
///   x~_{n+1/2}  = r x~'_n + (1 - r) x~_1 - (s_n / alpha_{n+1}) g_n,  r = alpha_n / alpha_{n+1}
///   x_{n+1}     = mirror_prox(G, phi, grad phi^{-1}(x~_{n+1/2}), gamma_{n+1} / alpha_{n+1})
/// with gamma_{n+1} = gamma_n - t_n + s_n, and h_{n+1} read off the prox.
template <typename Scalar>
void step(SolverState<Scalar>& st, const CompositeProblem<Scalar>& p, const Schedule<Scalar>& sched,
          const GradientMode& mode, const StepOptions& opts = {}) {
  const Eigen::Index n = st.n;
  const Scalar s_n = sched.s(n);
  const Scalar alpha_n = sched.alpha(n);
  const Scalar alpha_next = sched.alpha(n + 1);

  if (!(s_n > Scalar(0))) detail::violation(st, opts, "s_n must be positive");
  if (n > 1 && s_n > sched.s(n - 1)) detail::violation(st, opts, "s must be non-increasing");
  if (!(alpha_n > Scalar(0)) || alpha_next < alpha_n) detail::violation(st, opts, "alpha must be positive and non-decreasing");

  Scalar t_n = detail::averaging_weight(st, sched);
  if (!(t_n >= Scalar(0)) || t_n > st.gamma * (Scalar(1) + Scalar(kAveragingSlack))) {
    detail::violation(st, opts, "averaging weight t_n must lie in [0, gamma_n]");
  } else {
    t_n = std::min(t_n, st.gamma);
  }
  // Even an unsafe run cannot take a prox step with negative weight.
  if ((st.gamma - t_n) + s_n < Scalar(0)) {
    throw ScheduleViolation("schedule violation at n = " + std::to_string(n) +
                            ": backward weight gamma_{n+1} would be negative");
  }
  const Scalar mu = st.gamma > Scalar(0) ? t_n / st.gamma : Scalar(0);

  const DualPoint<Scalar> g = mode.draw(p, st.x);
  if (dual_norm(g, p.mirror.dual_norm) > p.M + Scalar(1e-9)) {
    throw Error("subgradient dual norm exceeds the Lipschitz constant M at n = " + std::to_string(n));
  }

  const Scalar ratio = alpha_n / alpha_next;
  Vector<Scalar> half = (Scalar(1) - mu) * st.x_tilde_half.coords() + mu * st.x_tilde.coords();
  half = ratio * half + (Scalar(1) - ratio) * st.x_tilde_1.coords() - (s_n / alpha_next) * g.coords();

  st.dual_accum.coords() += s_n * g.coords() + t_n * st.h.coords();
  const Scalar gamma_next = (st.gamma - t_n) + s_n;
  const Scalar beta = gamma_next / alpha_next;

  st.x_tilde_half = DualPoint<Scalar>(std::move(half));
  st.x = mirror_prox(p.G, p.mirror, phi_grad_inverse(p.mirror, st.x_tilde_half), beta);
  st.x_tilde = phi_grad(p.mirror, st.x);
  if (beta > Scalar(0)) {
    st.h = DualPoint<Scalar>((st.x_tilde_half.coords() - st.x_tilde.coords()) / beta);
  } else {
    st.h = DualPoint<Scalar>::zero(p.dim());
  }
  st.gamma = gamma_next;
  st.alpha = alpha_next;
  st.backward_step = beta;
  st.n = n + 1;

  const Scalar s_next = sched.s(st.n);
  st.S += s_next;
  st.weighted_sum += s_next * st.x.coords();
  st.bound_acc += s_next * s_next / alpha_next;
  st.f_x = objective(p, st.x);
  if (st.f_x < st.best_f) {
    st.best_f = st.f_x;
    st.best_x = st.x;
  }
}

/// h_n in dG(x_n), as extracted from the most recent prox (h_1 = 0).
template <typename Scalar>
const DualPoint<Scalar>& extract_h(const SolverState<Scalar>& st) {
  return st.h;
}

/// x-bar_n = S_n^{-1} sum s_i x_i.
template <typename Scalar>
PrimalPoint<Scalar> averaged_iterate(const SolverState<Scalar>& st) {
  if (st.n < 1 || !(st.S > Scalar(0))) throw Error("averaged_iterate: no iterates accumulated");
  return PrimalPoint<Scalar>(st.weighted_sum / st.S);
}

/// S_n^{-1} (alpha_n D + M^2 / (2 sigma) sum s_i^2 / alpha_i) with D = D_phi(x*, x_1).
template <typename Scalar>
Scalar theoretical_bound(const SolverState<Scalar>& st, Scalar D_star, Scalar M, Scalar sigma) {
  return (st.alpha * D_star + M * M / (Scalar(2) * sigma) * st.bound_acc) / st.S;
}

/// x_n recomputed from the argmin form
///   argmin_x <dual_accum, x> + alpha_n D_phi(x, x_1) + gamma_n G(x),
/// solved in closed form as prox(x_1 - dual_accum / alpha_n, gamma_n / alpha_n).
/// Euclidean mirror with l1, zero or box G.
template <typename Scalar>
PrimalPoint<Scalar> argmin_form_iterate(const SolverState<Scalar>& st, const CompositeProblem<Scalar>& p) {
  const auto k = p.G.kind();
  if (p.mirror.kind != MirrorKind::Euclidean ||
      !(k == RegularizerKind::L1 || k == RegularizerKind::Zero || k == RegularizerKind::Box)) {
    throw ConfigError("argmin_form_iterate: needs the Euclidean mirror with l1, zero or box G");
  }
  if (st.n == 1) return st.x_1;
  const PrimalPoint<Scalar> centre(st.x_1.coords() - st.dual_accum.coords() / st.alpha);
  return mirror_prox(p.G, p.mirror, centre, st.gamma / st.alpha);
}

template <typename Scalar>
Eigen::Index nnz(const PrimalPoint<Scalar>& x) {
  return (x.coords().array().abs() > Scalar(kNnzThreshold)).count();
}

template <typename Scalar>
struct TraceRow {
  Eigen::Index n = 0;
  Scalar f_x = Scalar(0);
  Scalar f_avg = Scalar(0);
  Scalar gap_best = Scalar(0);
  Scalar gap_avg = Scalar(0);
  Scalar bound = Scalar(0);
  Scalar backward_step = Scalar(0);
  Eigen::Index nnz = 0;
  double elapsed_s = 0.0;
};

template <typename Scalar>
struct Trace {
  std::vector<TraceRow<Scalar>> rows;
};

template <typename Scalar>
struct RunOptions {
  Eigen::Index iterations = 1;
  Eigen::Index stride = 1;
  bool stochastic = false;
  std::uint64_t seed = 0;
  StepOptions step;
  bool record_time = false;
  /// Needed for the gap and bound columns; they read NaN without it.
  std::optional<ReferenceSolution<Scalar>> reference;
  /// Called after init and after every step.
  std::function<void(const SolverState<Scalar>&)> observer;
};

/// Applies `iterations` steps from the default start, logging a trace row
/// whenever n is a multiple of the stride. Deterministic given the options.
template <typename Scalar>
std::pair<SolverState<Scalar>, Trace<Scalar>> run(const CompositeProblem<Scalar>& p, const Schedule<Scalar>& sched,
                                                  const RunOptions<Scalar>& opts) {
  if (opts.iterations < 1) throw ConfigError("run: iterations must be >= 1");
  if (opts.stride < 1) throw ConfigError("run: stride must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();

  RngState rng(opts.seed);
  const GradientMode mode = opts.stochastic ? GradientMode::stochastic(rng) : GradientMode::exact();
  SolverState<Scalar> st = init(p, sched);

  Scalar D_star = nan;
  if (opts.reference) D_star = bregman(p.mirror, opts.reference->x_star, st.x_1);

  Trace<Scalar> trace;
  const auto log_row = [&]() {
    if (opts.observer) opts.observer(st);
    if (st.n % opts.stride != 0) return;
    TraceRow<Scalar> row;
    row.n = st.n;
    row.f_x = st.f_x;
    row.f_avg = objective(p, averaged_iterate(st));
    if (opts.reference) {
      row.gap_best = st.best_f - opts.reference->f_star;
      row.gap_avg = row.f_avg - opts.reference->f_star;
      row.bound = st.feasible ? theoretical_bound(st, D_star, p.M, p.mirror.sigma) : nan;
    } else {
      row.gap_best = row.gap_avg = row.bound = nan;
    }
    row.backward_step = next_backward_step(st, sched);
    row.nnz = nnz(st.x);
    if (opts.record_time) {
      row.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    trace.rows.push_back(row);
  };

  log_row();
  for (Eigen::Index k = 0; k < opts.iterations; ++k) {
    step(st, p, sched, mode, opts.step);
    log_row();
  }
  return {std::move(st), std::move(trace)};
}

}  // namespace xrda
