#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xrda/mirror.hpp"
#include "xrda/regularizer.hpp"

namespace xrda {

enum class LossKind { Logistic, LeastAbsoluteDeviation, Linear };

inline const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::Logistic: return "logistic";
    case LossKind::LeastAbsoluteDeviation: return "lad";
    case LossKind::Linear: return "linear";
  }
  return "?";
}

/// Recipe for a planted synthetic instance. For LAD the targets are
/// A x_true + noise * N(0,1); for logistic they are the signs of the same
/// quantity; for the linear objective the cost vector is U(0,1).
struct SyntheticRecipe {
  Eigen::Index rows = 1;
  Eigen::Index cols = 1;
  Eigen::Index sparsity = 1;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct ProblemDescription {
  LossKind loss = LossKind::LeastAbsoluteDeviation;
  Regularizer<Scalar> regularizer;
  MirrorKind mirror = MirrorKind::Euclidean;
  std::optional<Matrix<Scalar>> A;
  std::optional<Vector<Scalar>> b;
  std::optional<Vector<Scalar>> c;
  std::optional<SyntheticRecipe> synthetic;
  /// Rows per stochastic sample; 0 means the full batch.
  Eigen::Index batch_size = 0;
};

/// f = F + G with F a globally Lipschitz loss. Immutable once built.
template <typename Scalar>
struct CompositeProblem {
  LossKind loss = LossKind::LeastAbsoluteDeviation;
  Matrix<Scalar> A;
  Vector<Scalar> b;
  Vector<Scalar> c;
  Regularizer<Scalar> G;
  MirrorMap<Scalar> mirror;
  Scalar M = Scalar(0);
  Eigen::Index batch_size = 1;
  /// Generating vector of a synthetic instance, when there is one.
  std::optional<Vector<Scalar>> planted;

  [[nodiscard]] Eigen::Index dim() const { return loss == LossKind::Linear ? c.size() : A.cols(); }
  [[nodiscard]] Eigen::Index rows() const { return loss == LossKind::Linear ? 1 : A.rows(); }
};

/// Reproducible random state handed explicitly to stochastic oracles.
struct RngState {
  std::mt19937_64 engine;
  std::uint64_t draws = 0;

  explicit RngState(std::uint64_t seed = 0) : engine(seed) {}
};

template <typename Scalar>
struct GradientSample {
  DualPoint<Scalar> value;
  /// Number of samples drawn from the state before this one.
  std::uint64_t state_tag = 0;
};

namespace detail {

/// log(1 + exp(-z)) without overflow.
template <typename Scalar>
Scalar logistic_loss(Scalar z) {
  using std::exp;
  using std::log1p;
  return z > Scalar(0) ? log1p(exp(-z)) : -z + log1p(exp(z));
}

/// 1 / (1 + exp(z)), the magnitude of d/dz log(1 + exp(-z)).
template <typename Scalar>
Scalar logistic_slope(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) {
    const Scalar e = exp(-z);
    return e / (Scalar(1) + e);
  }
  return Scalar(1) / (Scalar(1) + exp(z));
}

template <typename Scalar>
Scalar sign0(Scalar v) {
  return v > Scalar(0) ? Scalar(1) : (v < Scalar(0) ? Scalar(-1) : Scalar(0));
}

}  // namespace detail

/// Lipschitz constant of F in the mirror's dual norm: the largest row dual
/// norm for the per-sample losses (whose slopes are bounded by one), the
/// dual norm of the cost for the linear objective.
template <typename Scalar>
Scalar estimate_lipschitz(const CompositeProblem<Scalar>& p) {
  const NormKind dn = p.mirror.dual_norm;
  if (p.loss == LossKind::Linear) return norm_of(p.c, dn);
  Scalar best(0);
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) best = std::max(best, norm_of(p.A.row(i).transpose(), dn));
  return best;
}

template <typename Scalar>
CompositeProblem<Scalar> build_problem(const ProblemDescription<Scalar>& desc) {
  require_prox_supported(desc.mirror, desc.regularizer.kind());
  CompositeProblem<Scalar> p;
  p.loss = desc.loss;
  p.G = desc.regularizer;
  p.mirror = MirrorMap<Scalar>::of(desc.mirror);

  if (desc.synthetic) {
    const SyntheticRecipe& r = *desc.synthetic;
    if (r.cols < 1 || r.rows < 1) throw ConfigError("synthetic recipe: rows and cols must be >= 1");
    if (r.sparsity < 0 || r.sparsity > r.cols) throw ConfigError("synthetic recipe: sparsity must lie in [0, cols]");
    if (!(r.noise >= 0.0)) throw ConfigError("synthetic recipe: noise must be >= 0");
    std::mt19937_64 rng(r.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (desc.loss == LossKind::Linear) {
      p.c.resize(r.cols);
      for (Eigen::Index j = 0; j < r.cols; ++j) p.c[j] = Scalar(unit(rng));
    } else {
      p.A.resize(r.rows, r.cols);
      for (Eigen::Index i = 0; i < r.rows; ++i) {
        for (Eigen::Index j = 0; j < r.cols; ++j) p.A(i, j) = Scalar(normal(rng));
      }
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(r.cols));
      for (Eigen::Index j = 0; j < r.cols; ++j) idx[static_cast<std::size_t>(j)] = j;
      std::shuffle(idx.begin(), idx.end(), rng);
      Vector<Scalar> x_true = Vector<Scalar>::Zero(r.cols);
      for (Eigen::Index k = 0; k < r.sparsity; ++k) {
        const double mag = 1.0 + unit(rng);
        x_true[idx[static_cast<std::size_t>(k)]] = Scalar(unit(rng) < 0.5 ? -mag : mag);
      }
      Vector<Scalar> z = p.A * x_true;
      for (Eigen::Index i = 0; i < r.rows; ++i) z[i] += Scalar(r.noise * normal(rng));
      if (desc.loss == LossKind::Logistic) {
        p.b = z.unaryExpr([](Scalar v) { return v >= Scalar(0) ? Scalar(1) : Scalar(-1); });
      } else {
        p.b = std::move(z);
      }
      p.planted = std::move(x_true);
    }
  } else if (desc.loss == LossKind::Linear) {
    if (!desc.c) throw ConfigError("linear objective needs a cost vector c");
    p.c = *desc.c;
  } else {
    if (!desc.A || !desc.b) throw ConfigError(std::string(to_string(desc.loss)) + " loss needs data A and targets b");
    p.A = *desc.A;
    p.b = *desc.b;
  }

  if (p.loss == LossKind::Linear) {
    if (p.c.size() < 1) throw DimensionError("linear objective: cost vector must be nonempty");
  } else {
    if (p.A.rows() < 1 || p.A.cols() < 1) throw DimensionError("data matrix must be at least 1x1");
    if (p.b.size() != p.A.rows()) {
      throw DimensionError("targets b has " + std::to_string(p.b.size()) + " entries but A has " +
                           std::to_string(p.A.rows()) + " rows");
    }
    if (!p.A.allFinite() || !p.b.allFinite()) throw ConfigError("data must be finite");
    if (p.loss == LossKind::Logistic && !((p.b.array() == Scalar(1)) || (p.b.array() == Scalar(-1))).all()) {
      throw ConfigError("logistic loss requires labels in {-1, +1}");
    }
  }
  if (const auto* box = std::get_if<reg::Box<Scalar>>(&p.G.variant())) {
    require_same_dim(box->lo.size(), p.dim(), "box bounds vs problem dimension");
  }

  p.batch_size = desc.batch_size == 0 ? p.rows() : desc.batch_size;
  if (p.batch_size < 1 || p.batch_size > p.rows()) {
    throw ConfigError("batch size must lie in [1, " + std::to_string(p.rows()) + "]");
  }
  p.M = estimate_lipschitz(p);
  return p;
}

/// F(x) and an element of dF(x) over the given rows (all rows when empty).
template <typename Scalar>
std::pair<Scalar, DualPoint<Scalar>> loss_value_and_subgradient(const CompositeProblem<Scalar>& p,
                                                                const PrimalPoint<Scalar>& x,
                                                                std::span<const Eigen::Index> rows = {}) {
  require_same_dim(x.dim(), p.dim(), "loss evaluation");
  if (p.loss == LossKind::Linear) return {p.c.dot(x.coords()), DualPoint<Scalar>(p.c)};

  // value contribution and d(loss_i)/dz_i for one row with z_i = a_i^T x
  const auto row_terms = [&](Eigen::Index i, Scalar z) -> std::pair<Scalar, Scalar> {
    if (p.loss == LossKind::LeastAbsoluteDeviation) {
      const Scalar r = z - p.b[i];
      return {std::abs(r), detail::sign0(r)};
    }
    const Scalar margin = p.b[i] * z;
    return {detail::logistic_loss(margin), -p.b[i] * detail::logistic_slope(margin)};
  };

  Scalar value(0);
  if (rows.empty()) {
    const Vector<Scalar> z = p.A * x.coords();
    Vector<Scalar> w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const auto [v, slope] = row_terms(i, z[i]);
      value += v;
      w[i] = slope;
    }
    const Scalar inv = Scalar(1) / Scalar(z.size());
    return {value * inv, DualPoint<Scalar>((p.A.transpose() * w) * inv)};
  }

  Vector<Scalar> g = Vector<Scalar>::Zero(p.dim());
  for (Eigen::Index i : rows) {
    const auto [v, slope] = row_terms(i, p.A.row(i).dot(x.coords()));
    value += v;
    if (slope != Scalar(0)) g.noalias() += slope * p.A.row(i).transpose();
  }
  const Scalar inv = Scalar(1) / Scalar(rows.size());
  return {value * inv, DualPoint<Scalar>(g * inv)};
}

template <typename Scalar>
Scalar loss_value(const CompositeProblem<Scalar>& p, const PrimalPoint<Scalar>& x) {
  require_same_dim(x.dim(), p.dim(), "loss evaluation");
  if (p.loss == LossKind::Linear) return p.c.dot(x.coords());
  const Vector<Scalar> z = p.A * x.coords();
  Scalar value(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    value += p.loss == LossKind::LeastAbsoluteDeviation ? std::abs(z[i] - p.b[i])
                                                        : detail::logistic_loss(p.b[i] * z[i]);
  }
  return value / Scalar(z.size());
}

template <typename Scalar>
DualPoint<Scalar> loss_subgradient(const CompositeProblem<Scalar>& p, const PrimalPoint<Scalar>& x) {
  return loss_value_and_subgradient(p, x).second;
}

/// f(x) = F(x) + G(x).
template <typename Scalar>
Scalar objective(const CompositeProblem<Scalar>& p, const PrimalPoint<Scalar>& x) {
  return loss_value(p, x) + reg_value(p.G, x);
}

/// Draws `batch_size` distinct rows uniformly (Floyd's algorithm), sorted.
template <typename Scalar>
std::vector<Eigen::Index> sample_batch(const CompositeProblem<Scalar>& p, RngState& state) {
  const Eigen::Index m = p.rows();
  const Eigen::Index B = p.batch_size;
  if (B > m || B < 1) throw ConfigError("batch size must lie in [1, rows]");
  std::set<Eigen::Index> chosen;
  for (Eigen::Index j = m - B; j < m; ++j) {
    std::uniform_int_distribution<Eigen::Index> pick(0, j);
    const Eigen::Index t = pick(state.engine);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

/// Unbiased stochastic subgradient: the subgradient of the average loss
/// over a uniformly drawn batch. The full batch reproduces the exact
/// subgradient; the linear objective is deterministic.
template <typename Scalar>
GradientSample<Scalar> sample_subgradient(const CompositeProblem<Scalar>& p, const PrimalPoint<Scalar>& x,
                                          RngState& state) {
  GradientSample<Scalar> out;
  out.state_tag = state.draws++;
  if (p.loss == LossKind::Linear || p.batch_size == p.rows()) {
    out.value = loss_subgradient(p, x);
    return out;
  }
  const std::vector<Eigen::Index> rows = sample_batch(p, state);
  out.value = loss_value_and_subgradient(p, x, std::span<const Eigen::Index>(rows)).second;
  return out;
}

}  // namespace xrda
