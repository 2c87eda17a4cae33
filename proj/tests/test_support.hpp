#pragma once

#include <random>

#include "xrda/xrda.hpp"

namespace xrda::testing {

using V = Vector<double>;
using PP = PrimalPoint<double>;
using DP = DualPoint<double>;

inline V vec(std::initializer_list<double> xs) {
  V v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline PP pp(std::initializer_list<double> xs) { return PP(vec(xs)); }
inline DP dp(std::initializer_list<double> xs) { return DP(vec(xs)); }

inline V gaussian(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  V v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

/// Random point in the interior of the probability simplex.
inline V simplex_point(std::mt19937_64& rng, Eigen::Index d) {
  std::exponential_distribution<double> e(1.0);
  V v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = e(rng) + 1e-6;
  return v / v.sum();
}

inline CompositeProblem<double> synthetic(LossKind loss, Regularizer<double> g, Eigen::Index m, Eigen::Index d,
                                          Eigen::Index k, double noise, std::uint64_t seed,
                                          Eigen::Index batch = 0) {
  ProblemDescription<double> desc;
  desc.loss = loss;
  desc.regularizer = std::move(g);
  desc.synthetic = SyntheticRecipe{m, d, k, noise, seed};
  desc.batch_size = batch;
  return build_problem(desc);
}

inline double linf(const V& a, const V& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace xrda::testing
