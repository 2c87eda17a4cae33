#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <span>

#include "test_support.hpp"

namespace xrda::testing {
namespace {

using R = Regularizer<double>;

CompositeProblem<double> inline_problem(LossKind loss, Matrix<double> A, V b, R g = R::zero(), Eigen::Index batch = 0) {
  ProblemDescription<double> d;
  d.loss = loss;
  d.A = std::move(A);
  d.b = std::move(b);
  d.regularizer = std::move(g);
  d.batch_size = batch;
  return build_problem(d);
}

CompositeProblem<double> linear_problem(V c, MirrorKind mirror = MirrorKind::NegativeEntropy, R g = R::simplex()) {
  ProblemDescription<double> d;
  d.loss = LossKind::Linear;
  d.c = std::move(c);
  d.regularizer = std::move(g);
  d.mirror = mirror;
  return build_problem(d);
}

Matrix<double> mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> xs) {
  Matrix<double> A(r, c);
  auto it = xs.begin();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) A(i, j) = *it++;
  return A;
}

TEST(Problem, BuildEchoesInlineData) {
  const auto p = inline_problem(LossKind::Logistic, Matrix<double>::Identity(2, 2), vec({1, -1}), R::l1(0.1));
  EXPECT_EQ(p.dim(), 2);
  EXPECT_EQ(p.rows(), 2);
  EXPECT_EQ(p.G.lambda(), 0.1);
  EXPECT_EQ(p.batch_size, 2);
}

TEST(Problem, LinearOverSimplex) {
  const auto p = linear_problem(vec({1, 2, 3}));
  EXPECT_EQ(p.dim(), 3);
  EXPECT_EQ(objective(p, pp({1, 0, 0})), 1.0);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) EXPECT_GE(objective(p, PP(simplex_point(rng, 3))), 1.0);
}

TEST(Problem, SyntheticIsDeterministic) {
  const auto a = synthetic(LossKind::LeastAbsoluteDeviation, R::l1(0.1), 50, 100, 5, 0.5, 7);
  const auto b = synthetic(LossKind::LeastAbsoluteDeviation, R::l1(0.1), 50, 100, 5, 0.5, 7);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.b, b.b);
  ASSERT_TRUE(a.planted.has_value());
  EXPECT_EQ(*a.planted, *b.planted);
  EXPECT_EQ(nnz(PP(*a.planted)), 5);
  const auto c = synthetic(LossKind::LeastAbsoluteDeviation, R::l1(0.1), 50, 100, 5, 0.5, 8);
  EXPECT_NE(a.A, c.A);
}

TEST(Problem, BuildErrors) {
  EXPECT_THROW(inline_problem(LossKind::LeastAbsoluteDeviation, Matrix<double>::Identity(2, 2), vec({1, 2, 3})),
               DimensionError);
  EXPECT_THROW(inline_problem(LossKind::Logistic, Matrix<double>::Identity(2, 2), vec({1, 0})), ConfigError);
  EXPECT_THROW(linear_problem(vec({1, 2}), MirrorKind::NegativeEntropy, R::l1(1)), ConfigError);
  EXPECT_THROW(inline_problem(LossKind::LeastAbsoluteDeviation, Matrix<double>::Identity(2, 2), vec({1, 2}),
                              R::zero(), 3),
               ConfigError);
  EXPECT_THROW(inline_problem(LossKind::LeastAbsoluteDeviation, Matrix<double>::Identity(2, 2), vec({1, 2}),
                              R::box(vec({0, 0, 0}), vec({1, 1, 1}))),
               DimensionError);
}

TEST(Problem, LossExamples) {
  const auto lin = linear_problem(vec({1, 2}), MirrorKind::Euclidean, R::zero());
  auto [f, g] = loss_value_and_subgradient(lin, pp({1, 1}));
  EXPECT_EQ(f, 3.0);
  EXPECT_EQ(g, dp({1, 2}));

  const auto lad = inline_problem(LossKind::LeastAbsoluteDeviation, mat(1, 1, {1}), vec({0}));
  EXPECT_EQ(loss_value(lad, pp({0})), 0.0);
  EXPECT_EQ(loss_subgradient(lad, pp({0})), dp({0}));

  const auto lg = inline_problem(LossKind::Logistic, mat(1, 1, {1}), vec({1}));
  EXPECT_NEAR(loss_value(lg, pp({0})), std::log(2.0), 1e-15);
  EXPECT_NEAR(loss_subgradient(lg, pp({0}))[0], -0.5, 1e-15);
}

TEST(Problem, LogisticIsStableForLargeMargins) {
  const auto lg = inline_problem(LossKind::Logistic, mat(2, 1, {1, 1}), vec({1, -1}));
  const double v = loss_value(lg, pp({800}));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 400.0, 1e-9);
  EXPECT_TRUE(loss_subgradient(lg, pp({-800})).all_finite());
}

TEST(Problem, Lipschitz) {
  EXPECT_EQ(linear_problem(vec({1, -3, 2})).M, 3.0);
  const auto A = mat(2, 2, {3, 4, 0, 1});
  EXPECT_EQ(inline_problem(LossKind::LeastAbsoluteDeviation, A, vec({0, 0})).M, 5.0);
  EXPECT_EQ(inline_problem(LossKind::Logistic, A, vec({1, -1})).M, 5.0);
}

TEST(Problem, FullBatchSampleIsExact) {
  const auto p = synthetic(LossKind::LeastAbsoluteDeviation, R::l1(0.1), 30, 6, 2, 0.5, 3, 30);
  RngState rng(9);
  const PP x(V::LinSpaced(6, -1, 1));
  EXPECT_EQ(sample_subgradient(p, x, rng).value, loss_subgradient(p, x));
}

TEST(Problem, SingletonBatchesAverageToFullSubgradient) {
  const auto p = inline_problem(LossKind::LeastAbsoluteDeviation, mat(2, 2, {1, 2, -1, 0.5}), vec({0.3, -2}),
                                R::zero(), 1);
  const PP x = pp({0.4, -0.1});
  const std::array<Eigen::Index, 1> r0{0}, r1{1};
  const V mean = 0.5 * (loss_value_and_subgradient(p, x, r0).second.coords() +
                        loss_value_and_subgradient(p, x, r1).second.coords());
  EXPECT_LE(linf(mean, loss_subgradient(p, x).coords()), 1e-12);
}

TEST(Problem, SamplingIsReproducible) {
  const auto p = synthetic(LossKind::Logistic, R::l1(0.1), 40, 5, 2, 0.5, 3, 4);
  const PP x(V::Constant(5, 0.2));
  RngState a(77), b(77);
  for (int k = 0; k < 20; ++k) {
    const auto sa = sample_subgradient(p, x, a);
    const auto sb = sample_subgradient(p, x, b);
    EXPECT_EQ(sa.value, sb.value);
    EXPECT_EQ(sa.state_tag, sb.state_tag);
    EXPECT_EQ(sa.state_tag, static_cast<std::uint64_t>(k));
  }
}

TEST(Problem, BatchesAreUniformWithoutReplacement) {
  const auto p = synthetic(LossKind::LeastAbsoluteDeviation, R::zero(), 5, 2, 1, 0.1, 1, 2);
  RngState rng(5);
  std::map<std::vector<Eigen::Index>, int> counts;
  const int draws = 50000;
  for (int k = 0; k < draws; ++k) {
    const auto b = sample_batch(p, rng);
    ASSERT_EQ(b.size(), 2u);
    ASSERT_LT(b[0], b[1]);
    ++counts[b];
  }
  ASSERT_EQ(counts.size(), 10u);
  double chi2 = 0;
  for (const auto& [b, c] : counts) chi2 += std::pow(c - draws / 10.0, 2) / (draws / 10.0);
  // 9 degrees of freedom; 27.9 is the 0.999 quantile.
  EXPECT_LT(chi2, 27.9);
}

void for_each_subset(Eigen::Index m, Eigen::Index B, const std::function<void(const std::vector<Eigen::Index>&)>& fn) {
  std::vector<Eigen::Index> cur;
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index start) {
    if (static_cast<Eigen::Index>(cur.size()) == B) return fn(cur);
    for (Eigen::Index i = start; i < m; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

TEST(ProblemProperty, BatchEnumerationIsUnbiased) {
  std::mt19937_64 rng(21);
  for (LossKind loss : {LossKind::LeastAbsoluteDeviation, LossKind::Logistic}) {
    for (Eigen::Index m = 1; m <= 8; ++m) {
      for (Eigen::Index B = 1; B <= m; ++B) {
        const auto p = synthetic(loss, R::zero(), m, 4, 2, 0.3, static_cast<std::uint64_t>(m * 10 + B), B);
        const PP x(gaussian(rng, 4));
        V acc = V::Zero(4);
        int count = 0;
        for_each_subset(m, B, [&](const std::vector<Eigen::Index>& rows) {
          acc += loss_value_and_subgradient(p, x, std::span<const Eigen::Index>(rows)).second.coords();
          ++count;
        });
        ASSERT_LE(linf(acc / count, loss_subgradient(p, x).coords()), 1e-12);
      }
    }
  }
}

TEST(ProblemProperty, SubgradientsBoundedByLipschitz) {
  std::mt19937_64 rng(22);
  const auto lad = synthetic(LossKind::LeastAbsoluteDeviation, R::l1(0.1), 50, 20, 5, 0.5, 7, 1);
  const auto lg = synthetic(LossKind::Logistic, R::l1(0.1), 50, 20, 5, 0.5, 7, 3);
  const auto lin = linear_problem(vec({0.3, -2, 1.5, 0.2}));
  RngState state(1);
  for (int k = 0; k < 10000; ++k) {
    for (const auto* p : {&lad, &lg}) {
      const PP x(gaussian(rng, 20, 3.0));
      const NormKind dn = p->mirror.dual_norm;
      ASSERT_LE(dual_norm(loss_subgradient(*p, x), dn), p->M + 1e-9);
      ASSERT_LE(dual_norm(sample_subgradient(*p, x, state).value, dn), p->M + 1e-9);
    }
    const PP q(simplex_point(rng, 4));
    ASSERT_LE(dual_norm(loss_subgradient(lin, q), NormKind::Linf), lin.M + 1e-9);
  }
}

TEST(ProblemProperty, SubgradientInequality) {
  std::mt19937_64 rng(23);
  const auto lad = synthetic(LossKind::LeastAbsoluteDeviation, R::zero(), 30, 8, 3, 0.5, 2);
  const auto lg = synthetic(LossKind::Logistic, R::zero(), 30, 8, 3, 0.5, 2);
  for (int k = 0; k < 2000; ++k) {
    for (const auto* p : {&lad, &lg}) {
      const PP x(gaussian(rng, 8)), z(gaussian(rng, 8));
      const auto g = loss_subgradient(*p, x);
      ASSERT_GE(loss_value(*p, z), loss_value(*p, x) + g.coords().dot(z.coords() - x.coords()) - 1e-9);
    }
  }
}

TEST(ProblemProperty, LogisticGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(24);
  const auto lg = synthetic(LossKind::Logistic, R::zero(), 25, 6, 3, 0.5, 4);
  const double eps = 1e-6;
  for (int k = 0; k < 100; ++k) {
    const V x = gaussian(rng, 6);
    const auto g = loss_subgradient(lg, PP(x));
    for (Eigen::Index i = 0; i < 6; ++i) {
      V a = x, b = x;
      a[i] += eps;
      b[i] -= eps;
      ASSERT_NEAR(g[i], (loss_value(lg, PP(a)) - loss_value(lg, PP(b))) / (2 * eps), 1e-6);
    }
  }
}

}  // namespace
}  // namespace xrda::testing
