#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "xrda/point.hpp"

namespace xrda {

enum class NormKind { L1, L2, Linf };

enum class MirrorKind { Euclidean, NegativeEntropy };

inline const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
  }
  return "?";
}

inline const char* to_string(MirrorKind k) {
  return k == MirrorKind::Euclidean ? "euclidean" : "entropy";
}

/// Smallest entry accepted in the interior of the entropy domain.
inline constexpr double kEntropyFloor = 1e-300;

/// A mirror function phi together with its strong-convexity modulus and the
/// (primal, dual) norm pair it is strongly convex against.
///
/// Only the two standard mirrors are provided. The norm pair is fixed per
/// mirror: the Lipschitz constant of the loss is measured in `dual_norm`.
template <typename Scalar>
struct MirrorMap {
  MirrorKind kind = MirrorKind::Euclidean;
  Scalar sigma = Scalar(1);
  NormKind primal_norm = NormKind::L2;
  NormKind dual_norm = NormKind::L2;

  /// phi(x) = 1/2 |x|_2^2 on R^d.
  static MirrorMap euclidean() { return {MirrorKind::Euclidean, Scalar(1), NormKind::L2, NormKind::L2}; }

  /// phi(x) = sum x_i log x_i on the open positive orthant. 1-strongly convex
  /// in the l1 norm on the simplex (Pinsker).
  static MirrorMap negative_entropy() {
    return {MirrorKind::NegativeEntropy, Scalar(1), NormKind::L1, NormKind::Linf};
  }

  static MirrorMap of(MirrorKind k) { return k == MirrorKind::Euclidean ? euclidean() : negative_entropy(); }
};

template <typename Scalar>
Scalar pairing(const DualPoint<Scalar>& g, const PrimalPoint<Scalar>& x) {
  require_same_dim(g.dim(), x.dim(), "pairing");
  return g.coords().dot(x.coords());
}

template <typename Derived>
typename Derived::Scalar norm_of(const Eigen::MatrixBase<Derived>& v, NormKind which) {
  switch (which) {
    case NormKind::L1: return v.template lpNorm<1>();
    case NormKind::L2: return v.norm();
    case NormKind::Linf: return v.size() == 0 ? typename Derived::Scalar(0) : v.template lpNorm<Eigen::Infinity>();
  }
  return typename Derived::Scalar(0);
}

template <typename Scalar>
Scalar norm(const PrimalPoint<Scalar>& x, NormKind which) {
  return norm_of(x.coords(), which);
}

template <typename Scalar>
Scalar dual_norm(const DualPoint<Scalar>& g, NormKind which) {
  return norm_of(g.coords(), which);
}

namespace detail {

template <typename Scalar>
void require_entropy_interior(const Vector<Scalar>& x, const char* what) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= Scalar(kEntropyFloor)) || !std::isfinite(static_cast<double>(x[i]))) {
      throw DomainError(std::string(what) + ": entry " + std::to_string(i) +
                        " is outside the entropy domain (must be >= 1e-300 and finite)");
    }
  }
}

}  // namespace detail

template <typename Scalar>
Scalar phi_value(const MirrorMap<Scalar>& m, const PrimalPoint<Scalar>& x) {
  if (m.kind == MirrorKind::Euclidean) return Scalar(0.5) * x.coords().squaredNorm();
  detail::require_entropy_interior(x.coords(), "phi_value");
  using std::log;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < x.dim(); ++i) acc += x[i] * log(x[i]);
  return acc;
}

template <typename Scalar>
DualPoint<Scalar> phi_grad(const MirrorMap<Scalar>& m, const PrimalPoint<Scalar>& x) {
  if (m.kind == MirrorKind::Euclidean) return DualPoint<Scalar>(x.coords());
  detail::require_entropy_interior(x.coords(), "phi_grad");
  return DualPoint<Scalar>((x.coords().array().log() + Scalar(1)).matrix());
}

/// Inverse of the mirror gradient. For the entropy mirror this is
/// exp(x~ - 1), defined on all of V*; results that overflow or underflow the
/// entropy domain are reported instead of saturated.
template <typename Scalar>
PrimalPoint<Scalar> phi_grad_inverse(const MirrorMap<Scalar>& m, const DualPoint<Scalar>& xt) {
  if (m.kind == MirrorKind::Euclidean) return PrimalPoint<Scalar>(xt.coords());
  Vector<Scalar> x = (xt.coords().array() - Scalar(1)).exp().matrix();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(static_cast<double>(x[i]))) {
      throw DomainError("phi_grad_inverse: exp overflow at entry " + std::to_string(i));
    }
    if (x[i] < Scalar(kEntropyFloor)) {
      throw DomainError("phi_grad_inverse: entry " + std::to_string(i) + " underflows the entropy domain");
    }
  }
  return PrimalPoint<Scalar>(std::move(x));
}

/// D_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>.
///
/// `y` must lie in the interior of the domain; under the entropy mirror `x`
/// may sit on the boundary (zero entries contribute y_i, with 0 log 0 = 0).
template <typename Scalar>
Scalar bregman(const MirrorMap<Scalar>& m, const PrimalPoint<Scalar>& x, const PrimalPoint<Scalar>& y) {
  require_same_dim(x.dim(), y.dim(), "bregman");
  if (m.kind == MirrorKind::Euclidean) return Scalar(0.5) * (x.coords() - y.coords()).squaredNorm();
  detail::require_entropy_interior(y.coords(), "bregman (second argument)");
  using std::log;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < x.dim(); ++i) {
    const Scalar xi = x[i];
    const Scalar yi = y[i];
    if (xi == Scalar(0)) {
      acc += yi;
      continue;
    }
    if (!(xi >= Scalar(kEntropyFloor))) {
      throw DomainError("bregman: entry " + std::to_string(i) + " of first argument outside entropy domain");
    }
    acc += xi * log(xi / yi) - xi + yi;
  }
  return acc;
}

}  // namespace xrda
