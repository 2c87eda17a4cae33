#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "xrda/problem.hpp"

namespace xrda {

template <typename Scalar>
struct ReferenceSolution {
  PrimalPoint<Scalar> x_star;
  Scalar f_star = Scalar(0);
  /// Upper bound on f(x_star) - min f, from a Fenchel dual lower bound.
  Scalar certified_gap = std::numeric_limits<Scalar>::infinity();
  /// False when the budget ran out before the requested tolerance.
  bool converged = false;
  Eigen::Index iterations = 0;
};

template <typename Scalar>
struct ReferenceOptions {
  Scalar tolerance = Scalar(1e-9);
  /// Iterations of the prox-subgradient baseline; callers pass at least ten
  /// times the budget of the experiment being measured.
  Eigen::Index budget = 100000;
};

namespace detail {

/// Lower bound on min f from a loss dual vector u:
///   F(x) >= offset(u) + <w(u), x>,  so  min f >= offset + inf_x <w, x> + G(x).
/// For l1 or zero G the vector is shrunk so the infimum stays finite.
template <typename Scalar>
Scalar dual_value(const CompositeProblem<Scalar>& p, Vector<Scalar> u) {
  const Scalar m = Scalar(p.rows());
  const auto affine = [&](const Vector<Scalar>& uu, Scalar& offset) -> Vector<Scalar> {
    if (p.loss == LossKind::LeastAbsoluteDeviation) {
      offset = -p.b.dot(uu) / m;
      return p.A.transpose() * uu / m;
    }
    // logistic: log(1 + e^{-z}) = max_{v in [0,1]} -v z - H(v), H(v) = v log v + (1-v) log(1-v)
    Scalar acc(0);
    for (Eigen::Index i = 0; i < uu.size(); ++i) {
      const Scalar v = uu[i];
      Scalar h(0);
      if (v > Scalar(0)) h += v * std::log(v);
      if (v < Scalar(1)) h += (Scalar(1) - v) * std::log1p(-v);
      acc += h;
    }
    offset = -acc / m;
    return -(p.A.transpose() * (uu.array() * p.b.array()).matrix()) / m;
  };

  Scalar offset(0);
  Vector<Scalar> w = affine(u, offset);
  if (p.G.kind() == RegularizerKind::L1) {
    const Scalar wmax = w.template lpNorm<Eigen::Infinity>();
    if (wmax > p.G.lambda()) {
      // shrink slightly more than needed so rounding cannot leave |w| > lambda
      u *= (p.G.lambda() / wmax) * Scalar(1 - 1e-14);
      w = affine(u, offset);
    }
  }
  return offset + linear_infimum(p.G, w);
}

/// Certified lower bound on min f built from the natural dual of x.
template <typename Scalar>
Scalar lower_bound(const CompositeProblem<Scalar>& p, const PrimalPoint<Scalar>& x) {
  if (p.loss == LossKind::Linear) return linear_infimum(p.G, p.c);
  const Vector<Scalar> z = p.A * x.coords();
  Vector<Scalar> u(z.size());
  if (p.loss == LossKind::Logistic) {
    for (Eigen::Index i = 0; i < z.size(); ++i) u[i] = logistic_slope(p.b[i] * z[i]);
    return dual_value(p, std::move(u));
  }

  const Vector<Scalar> r = z - p.b;
  const Scalar scale = Scalar(1) + p.b.template lpNorm<Eigen::Infinity>();
  std::vector<Eigen::Index> zero_rows;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (std::abs(r[i]) <= Scalar(1e-9) * scale) {
      u[i] = Scalar(0);
      zero_rows.push_back(i);
    } else {
      u[i] = sign0(r[i]);
    }
  }
  if (p.G.kind() == RegularizerKind::L1 && !zero_rows.empty()) {
    // Choose the multipliers of interpolated rows to make the support
    // stationary: (1/m) A_S^T u = -lambda sign(x_S).
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < x.dim(); ++j) {
      if (std::abs(x[j]) > Scalar(1e-12)) support.push_back(j);
    }
    if (!support.empty()) {
      const Scalar m = Scalar(p.rows());
      const auto nz = static_cast<Eigen::Index>(zero_rows.size());
      const auto ns = static_cast<Eigen::Index>(support.size());
      Matrix<Scalar> K(ns, nz);
      Vector<Scalar> rhs(ns);
      for (Eigen::Index a = 0; a < ns; ++a) {
        const Eigen::Index j = support[static_cast<std::size_t>(a)];
        rhs[a] = -m * p.G.lambda() * sign0(x[j]) - p.A.col(j).dot(u);
        for (Eigen::Index c = 0; c < nz; ++c) K(a, c) = p.A(zero_rows[static_cast<std::size_t>(c)], j);
      }
      const Vector<Scalar> uz = K.completeOrthogonalDecomposition().solve(rhs);
      for (Eigen::Index c = 0; c < nz; ++c) {
        u[zero_rows[static_cast<std::size_t>(c)]] = std::clamp(uz[c], Scalar(-1), Scalar(1));
      }
    }
  }
  return dual_value(p, std::move(u));
}

/// Exact LAD + (l1 | zero) minimiser from the linear program
///   min (1/m) sum (r+ + r-) + lambda sum (x+ + x-)
///   s.t. A (x+ - x-) - r+ + r- = b,  all variables >= 0,
/// solved by a dense tableau simplex (Dantzig pricing, Bland's rule once
/// degenerate pivots pile up). The final basis is re-solved from the
/// original data so tableau round-off does not reach the answer.
template <typename Scalar>
std::optional<PrimalPoint<Scalar>> lad_simplex(const CompositeProblem<Scalar>& p) {
  const Eigen::Index m = p.A.rows();
  const Eigen::Index d = p.A.cols();
  const Eigen::Index n = 2 * d + 2 * m;
  Matrix<Scalar> cols(m, n);
  cols << p.A, -p.A, -Matrix<Scalar>::Identity(m, m), Matrix<Scalar>::Identity(m, m);
  Vector<Scalar> cost(n);
  cost << Vector<Scalar>::Constant(2 * d, p.G.lambda()), Vector<Scalar>::Constant(2 * m, Scalar(1) / Scalar(m));

  // Start from the residual slacks: r- where b >= 0, r+ (row negated) otherwise.
  Matrix<Scalar> T = cols;
  Vector<Scalar> rhs = p.b;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    if (p.b[i] >= Scalar(0)) {
      basis[static_cast<std::size_t>(i)] = 2 * d + m + i;
    } else {
      T.row(i) *= Scalar(-1);
      rhs[i] = -rhs[i];
      basis[static_cast<std::size_t>(i)] = 2 * d + i;
    }
  }
  Vector<Scalar> reduced = cost;
  for (Eigen::Index i = 0; i < m; ++i) reduced -= cost[basis[static_cast<std::size_t>(i)]] * T.row(i).transpose();

  const Scalar tol = Scalar(1e-12);
  const Eigen::Index max_pivots = 50 * (m + n);
  Eigen::Index degenerate = 0;
  for (Eigen::Index it = 0; it < max_pivots; ++it) {
    const bool bland = degenerate > m;
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (reduced[j] < -tol && (enter < 0 || (!bland && reduced[j] < reduced[enter]))) {
        enter = j;
        if (bland) break;
      }
    }
    if (enter < 0) {
      Matrix<Scalar> B(m, m);
      for (Eigen::Index i = 0; i < m; ++i) B.col(i) = cols.col(basis[static_cast<std::size_t>(i)]);
      const Vector<Scalar> xb = B.fullPivLu().solve(p.b);
      Vector<Scalar> x = Vector<Scalar>::Zero(d);
      for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index j = basis[static_cast<std::size_t>(i)];
        if (j < d) x[j] += xb[i];
        else if (j < 2 * d) x[j - d] -= xb[i];
      }
      return PrimalPoint<Scalar>(std::move(x));
    }
    Eigen::Index leave = -1;
    Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > tol) {
        const Scalar ratio = rhs[i] / T(i, enter);
        if (ratio < best_ratio - tol ||
            (ratio <= best_ratio + tol && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best_ratio = std::min(best_ratio, ratio);
          leave = i;
        }
      }
    }
    if (leave < 0) return std::nullopt;  // unbounded; cannot happen for this LP
    degenerate = best_ratio <= tol ? degenerate + 1 : 0;

    const Scalar piv = T(leave, enter);
    T.row(leave) /= piv;
    rhs[leave] /= piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave || T(i, enter) == Scalar(0)) continue;
      const Scalar f = T(i, enter);
      T.row(i) -= f * T.row(leave);
      rhs[i] -= f * rhs[leave];
      if (rhs[i] < Scalar(0)) rhs[i] = Scalar(0);
    }
    reduced -= reduced[enter] * T.row(leave).transpose();
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  return std::nullopt;
}

/// Accelerated proximal gradient for the smooth logistic loss under the
/// Euclidean mirror. Momentum restarts on the gradient-mapping test rather
/// than on objective increase, since near the optimum objective differences
/// drop below rounding while the iterate is still moving.
template <typename Scalar>
PrimalPoint<Scalar> logistic_polish(const CompositeProblem<Scalar>& p, const PrimalPoint<Scalar>& x0,
                                    Eigen::Index iters) {
  const Scalar L = p.A.operatorNorm() * p.A.operatorNorm() / (Scalar(4) * Scalar(p.rows()));
  if (!(L > Scalar(0))) return x0;
  const Scalar step = Scalar(1) / L;
  Vector<Scalar> x = x0.coords();
  Vector<Scalar> y = x;
  Scalar momentum(1);
  for (Eigen::Index k = 0; k < iters; ++k) {
    const auto g = loss_subgradient(p, PrimalPoint<Scalar>(y));
    Vector<Scalar> next =
        mirror_prox(p.G, p.mirror, PrimalPoint<Scalar>(y - step * g.coords()), step).coords();
    if ((next - x).template lpNorm<Eigen::Infinity>() == Scalar(0)) break;
    if ((y - next).dot(next - x) > Scalar(0)) {
      momentum = Scalar(1);
      x = next;
      y = std::move(next);
      continue;
    }
    const Scalar m_next = (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * momentum * momentum)) / Scalar(2);
    y = next + ((momentum - Scalar(1)) / m_next) * (next - x);
    momentum = m_next;
    x = std::move(next);
  }
  return PrimalPoint<Scalar>(std::move(x));
}

/// Minimiser of <c, x> + G(x) when it exists in closed form.
template <typename Scalar>
std::optional<PrimalPoint<Scalar>> linear_minimizer(const CompositeProblem<Scalar>& p) {
  const Vector<Scalar>& c = p.c;
  const Eigen::Index d = c.size();
  switch (p.G.kind()) {
    case RegularizerKind::Simplex: {
      Eigen::Index j = 0;
      c.minCoeff(&j);
      Vector<Scalar> e = Vector<Scalar>::Zero(d);
      e[j] = Scalar(1);
      return PrimalPoint<Scalar>(std::move(e));
    }
    case RegularizerKind::Box: {
      const auto& b = std::get<reg::Box<Scalar>>(p.G.variant());
      Vector<Scalar> z(d);
      for (Eigen::Index i = 0; i < d; ++i) z[i] = c[i] > Scalar(0) ? b.lo[i] : (c[i] < Scalar(0) ? b.hi[i] : Scalar(0));
      return PrimalPoint<Scalar>(z.cwiseMax(b.lo).cwiseMin(b.hi));
    }
    case RegularizerKind::L2Ball: {
      const Scalar nrm = c.norm();
      if (nrm == Scalar(0)) return PrimalPoint<Scalar>::zero(d);
      return PrimalPoint<Scalar>(-std::get<reg::L2Ball<Scalar>>(p.G.variant()).radius / nrm * c);
    }
    case RegularizerKind::L1:
      if (c.template lpNorm<Eigen::Infinity>() <= p.G.lambda()) return PrimalPoint<Scalar>::zero(d);
      return std::nullopt;
    case RegularizerKind::Zero:
      if ((c.array() == Scalar(0)).all()) return PrimalPoint<Scalar>::zero(d);
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// High-accuracy estimate of (x*, f*) from an algorithm family unrelated to
/// dual averaging: a forward-backward prox-subgradient baseline with
/// decreasing steps and weighted averaging, followed by a problem-specific
/// polish (simplex solve of the LAD linear program, accelerated proximal gradient for logistic).
/// Accuracy is certified by a Fenchel dual lower bound.
template <typename Scalar>
ReferenceSolution<Scalar> reference_optimum(const CompositeProblem<Scalar>& p, const ReferenceOptions<Scalar>& opts) {
  if (!(opts.tolerance > Scalar(0))) throw ConfigError("reference_optimum: tolerance must be positive");
  ReferenceSolution<Scalar> best;
  const auto consider = [&](const PrimalPoint<Scalar>& x) {
    const Scalar fx = objective(p, x);
    if (!std::isfinite(static_cast<double>(fx))) return;
    if (best.x_star.dim() == 0 || fx < best.f_star) {
      best.x_star = x;
      best.f_star = fx;
      return;
    }
    // Objective ties at rounding level are broken by the dual certificate.
    const Scalar eps = Scalar(8) * std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + std::abs(best.f_star));
    if (fx <= best.f_star + eps &&
        fx - detail::lower_bound(p, x) < best.f_star - detail::lower_bound(p, best.x_star)) {
      best.x_star = x;
      best.f_star = fx;
    }
  };
  const auto certify = [&]() {
    const Scalar lb = detail::lower_bound(p, best.x_star);
    best.certified_gap = std::max(Scalar(0), best.f_star - lb);
    if (!std::isfinite(static_cast<double>(lb))) best.certified_gap = std::numeric_limits<Scalar>::infinity();
    best.converged = best.certified_gap <= opts.tolerance;
    return best.converged;
  };

  const PrimalPoint<Scalar> x1 = canonical_argmin(p.G, p.dim());
  consider(x1);
  if (std::isinf(static_cast<double>(opts.tolerance))) {
    best.x_star = x1;
    best.f_star = objective(p, x1);
    best.certified_gap = std::max(Scalar(0), best.f_star - detail::lower_bound(p, x1));
    best.converged = true;
    return best;
  }

  if (p.loss == LossKind::Linear) {
    if (auto xs = detail::linear_minimizer(p)) {
      best.x_star = *xs;
      best.f_star = objective(p, *xs);
      certify();
      return best;
    }
    throw ConfigError("reference_optimum: linear objective is unbounded below for this regularizer");
  }

  const Scalar s0 = p.M > Scalar(0) ? Scalar(1) / p.M : Scalar(1);
  const Eigen::Index chunk = std::max<Eigen::Index>(1000, opts.budget / 20);
  const bool euclid = p.mirror.kind == MirrorKind::Euclidean;
  const bool lad_polish = euclid && p.loss == LossKind::LeastAbsoluteDeviation &&
                          (p.G.kind() == RegularizerKind::L1 || p.G.kind() == RegularizerKind::Zero);
  const bool logistic_polish = euclid && p.loss == LossKind::Logistic;

  PrimalPoint<Scalar> x = x1;
  Vector<Scalar> avg = Vector<Scalar>::Zero(p.dim());
  Scalar weight(0);
  Eigen::Index k = 0;
  while (k < opts.budget) {
    const Eigen::Index stop = std::min(opts.budget, k + chunk);
    for (; k < stop; ++k) {
      const Scalar s = s0 / std::sqrt(Scalar(k + 1));
      const auto [fx, g] = loss_value_and_subgradient(p, x);
      const Scalar f_total = fx + reg_value(p.G, x);
      if (f_total < best.f_star) {
        best.f_star = f_total;
        best.x_star = x;
      }
      const DualPoint<Scalar> moved(phi_grad(p.mirror, x).coords() - s * g.coords());
      x = mirror_prox(p.G, p.mirror, phi_grad_inverse(p.mirror, moved), s);
      avg += s * x.coords();
      weight += s;
    }
    best.iterations = k;
    consider(PrimalPoint<Scalar>(avg / weight));
    if (lad_polish) {
      if (auto exact = detail::lad_simplex(p)) consider(*exact);
    } else if (logistic_polish) {
      consider(detail::logistic_polish(p, best.x_star, chunk));
    }
    if (certify()) return best;
  }
  certify();
  return best;
}

}  // namespace xrda
