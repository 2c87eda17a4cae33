#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include "xrda/mirror.hpp"

namespace xrda {

/// Absolute tolerance for indicator-set membership in reg_value.
inline constexpr double kMembershipTol = 1e-9;

enum class RegularizerKind { L1, Box, Simplex, L2Ball, Zero };

inline const char* to_string(RegularizerKind k) {
  switch (k) {
    case RegularizerKind::L1: return "l1";
    case RegularizerKind::Box: return "box";
    case RegularizerKind::Simplex: return "simplex";
    case RegularizerKind::L2Ball: return "l2_ball";
    case RegularizerKind::Zero: return "zero";
  }
  return "?";
}

namespace reg {

template <typename Scalar>
struct L1 {
  Scalar lambda;
};

template <typename Scalar>
struct Box {
  Vector<Scalar> lo;
  Vector<Scalar> hi;
};

struct Simplex {};

template <typename Scalar>
struct L2Ball {
  Scalar radius;
};

struct Zero {};

}  // namespace reg

/// The convex term G of a composite objective F + G.
///
/// Values are immutable and validated on construction.
template <typename Scalar>
class Regularizer {
 public:
  using Variant = std::variant<reg::L1<Scalar>, reg::Box<Scalar>, reg::Simplex, reg::L2Ball<Scalar>, reg::Zero>;

  Regularizer() : v_(reg::Zero{}) {}

  static Regularizer l1(Scalar lambda) {
    if (!(lambda > Scalar(0)) || !std::isfinite(static_cast<double>(lambda))) {
      throw ConfigError("l1 regularizer: lambda must be positive and finite");
    }
    return Regularizer(reg::L1<Scalar>{lambda});
  }

  static Regularizer box(Vector<Scalar> lo, Vector<Scalar> hi) {
    require_same_dim(lo.size(), hi.size(), "box regularizer");
    if ((lo.array() > hi.array()).any()) throw ConfigError("box regularizer: lo must be <= hi componentwise");
    return Regularizer(reg::Box<Scalar>{std::move(lo), std::move(hi)});
  }

  static Regularizer simplex() { return Regularizer(reg::Simplex{}); }

  static Regularizer l2_ball(Scalar radius) {
    if (!(radius > Scalar(0))) throw ConfigError("l2 ball regularizer: radius must be positive");
    return Regularizer(reg::L2Ball<Scalar>{radius});
  }

  static Regularizer zero() { return Regularizer(reg::Zero{}); }

  [[nodiscard]] RegularizerKind kind() const { return static_cast<RegularizerKind>(v_.index()); }
  [[nodiscard]] const Variant& variant() const { return v_; }

  /// lambda for L1, zero otherwise.
  [[nodiscard]] Scalar lambda() const {
    if (const auto* p = std::get_if<reg::L1<Scalar>>(&v_)) return p->lambda;
    return Scalar(0);
  }

 private:
  explicit Regularizer(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// G(x), with +infinity outside an indicator's set.
template <typename Scalar>
Scalar reg_value(const Regularizer<Scalar>& g, const PrimalPoint<Scalar>& x) {
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar tol(kMembershipTol);
  const auto& v = x.coords();
  return std::visit(
      overloaded{
          [&](const reg::L1<Scalar>& r) { return r.lambda * v.template lpNorm<1>(); },
          [&](const reg::Box<Scalar>& r) {
            require_same_dim(r.lo.size(), v.size(), "reg_value(box)");
            const bool inside = ((v - r.lo).array() >= -tol).all() && ((r.hi - v).array() >= -tol).all();
            return inside ? Scalar(0) : inf;
          },
          [&](const reg::Simplex&) {
            const bool inside = (v.array() >= -tol).all() && std::abs(v.sum() - Scalar(1)) <= tol;
            return inside ? Scalar(0) : inf;
          },
          [&](const reg::L2Ball<Scalar>& r) { return v.norm() <= r.radius + tol ? Scalar(0) : inf; },
          [&](const reg::Zero&) { return Scalar(0); },
      },
      g.variant());
}

inline bool prox_supported(MirrorKind m, RegularizerKind g) {
  if (m == MirrorKind::Euclidean) {
    return g == RegularizerKind::L1 || g == RegularizerKind::Box || g == RegularizerKind::L2Ball ||
           g == RegularizerKind::Zero;
  }
  return g == RegularizerKind::Simplex || g == RegularizerKind::Zero;
}

inline void require_prox_supported(MirrorKind m, RegularizerKind g) {
  if (!prox_supported(m, g)) {
    throw ConfigError(std::string("unsupported (mirror, regularizer) pair: (") + to_string(m) + ", " +
                      to_string(g) + "); supported: euclidean x {l1, box, l2_ball, zero}, entropy x {simplex, zero}");
  }
}

/// Mirror-prox (Bregman backward) step: argmin_z D_phi(z, y) + s G(z).
///
/// Every supported pair has a closed form: soft-thresholding, clamping and
/// radial projection under the Euclidean mirror, l1 normalisation for the
/// simplex under the entropy mirror. s = 0 returns y unchanged.
template <typename Scalar>
PrimalPoint<Scalar> mirror_prox(const Regularizer<Scalar>& g, const MirrorMap<Scalar>& m, const PrimalPoint<Scalar>& y,
                                Scalar s) {
  require_prox_supported(m.kind, g.kind());
  if (s < Scalar(0)) throw ConfigError("mirror_prox: step must be nonnegative");
  if (m.kind == MirrorKind::NegativeEntropy) detail::require_entropy_interior(y.coords(), "mirror_prox");
  if (s == Scalar(0)) return y;

  const auto& v = y.coords();
  Vector<Scalar> out = std::visit(
      overloaded{
          [&](const reg::L1<Scalar>& r) -> Vector<Scalar> {
            const Scalar tau = s * r.lambda;
            Vector<Scalar> z(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) {
              if (v[i] > tau) {
                z[i] = v[i] - tau;
              } else if (v[i] < -tau) {
                z[i] = v[i] + tau;
              } else {
                z[i] = Scalar(0);
              }
            }
            return z;
          },
          [&](const reg::Box<Scalar>& r) -> Vector<Scalar> {
            require_same_dim(r.lo.size(), v.size(), "mirror_prox(box)");
            return v.cwiseMax(r.lo).cwiseMin(r.hi);
          },
          [&](const reg::Simplex&) -> Vector<Scalar> { return v / v.sum(); },
          [&](const reg::L2Ball<Scalar>& r) -> Vector<Scalar> {
            const Scalar nrm = v.norm();
            return nrm <= r.radius ? Vector<Scalar>(v) : Vector<Scalar>(v * (r.radius / nrm));
          },
          [&](const reg::Zero&) -> Vector<Scalar> { return v; },
      },
      g.variant());
  return PrimalPoint<Scalar>(std::move(out));
}

/// Tests h in dG(x) up to `tol`. Supported for L1, Box and Zero.
template <typename Scalar>
bool in_subdifferential(const Regularizer<Scalar>& g, const DualPoint<Scalar>& h, const PrimalPoint<Scalar>& x,
                        Scalar tol) {
  require_same_dim(h.dim(), x.dim(), "in_subdifferential");
  const auto& hv = h.coords();
  const auto& xv = x.coords();
  switch (g.kind()) {
    case RegularizerKind::L1: {
      const Scalar lambda = g.lambda();
      for (Eigen::Index i = 0; i < xv.size(); ++i) {
        if (std::abs(hv[i]) > lambda + tol) return false;
        if (std::abs(xv[i]) > tol) {
          const Scalar sgn = xv[i] > Scalar(0) ? Scalar(1) : Scalar(-1);
          if (std::abs(hv[i] - lambda * sgn) > tol) return false;
        }
      }
      return true;
    }
    case RegularizerKind::Box: {
      const auto& b = std::get<reg::Box<Scalar>>(g.variant());
      require_same_dim(b.lo.size(), xv.size(), "in_subdifferential(box)");
      for (Eigen::Index i = 0; i < xv.size(); ++i) {
        const bool at_hi = std::abs(xv[i] - b.hi[i]) <= tol;
        const bool at_lo = std::abs(xv[i] - b.lo[i]) <= tol;
        if (at_hi && at_lo) continue;
        if (at_hi) {
          if (hv[i] < -tol) return false;
        } else if (at_lo) {
          if (hv[i] > tol) return false;
        } else if (std::abs(hv[i]) > tol) {
          return false;
        }
      }
      return true;
    }
    case RegularizerKind::Zero:
      return hv.size() == 0 || hv.template lpNorm<Eigen::Infinity>() <= tol;
    default:
      throw ConfigError(std::string("in_subdifferential: unsupported regularizer kind ") + to_string(g.kind()));
  }
}

/// A fixed minimiser of G used as the starting point x_1.
template <typename Scalar>
PrimalPoint<Scalar> canonical_argmin(const Regularizer<Scalar>& g, Eigen::Index dim) {
  if (dim < 1) throw DimensionError("canonical_argmin: dim must be >= 1");
  return std::visit(
      overloaded{
          [&](const reg::Box<Scalar>& r) {
            require_same_dim(r.lo.size(), dim, "canonical_argmin(box)");
            Vector<Scalar> z(dim);
            for (Eigen::Index i = 0; i < dim; ++i) {
              const bool has_zero = r.lo[i] <= Scalar(0) && Scalar(0) <= r.hi[i];
              z[i] = has_zero ? Scalar(0) : Scalar(0.5) * (r.lo[i] + r.hi[i]);
            }
            return PrimalPoint<Scalar>(std::move(z));
          },
          [&](const reg::Simplex&) {
            return PrimalPoint<Scalar>(Vector<Scalar>::Constant(dim, Scalar(1) / Scalar(dim)));
          },
          [&](const auto&) { return PrimalPoint<Scalar>::zero(dim); },
      },
      g.variant());
}

/// inf_x <w, x> + G(x), possibly -infinity. Supplies the regularizer half of
/// Fenchel-type lower bounds.
template <typename Scalar>
Scalar linear_infimum(const Regularizer<Scalar>& g, const Vector<Scalar>& w) {
  const Scalar ninf = -std::numeric_limits<Scalar>::infinity();
  return std::visit(
      overloaded{
          [&](const reg::L1<Scalar>& r) {
            return w.size() == 0 || w.template lpNorm<Eigen::Infinity>() <= r.lambda ? Scalar(0) : ninf;
          },
          [&](const reg::Box<Scalar>& r) {
            require_same_dim(r.lo.size(), w.size(), "linear_infimum(box)");
            Scalar acc(0);
            for (Eigen::Index i = 0; i < w.size(); ++i) acc += std::min(w[i] * r.lo[i], w[i] * r.hi[i]);
            return acc;
          },
          [&](const reg::Simplex&) { return w.minCoeff(); },
          [&](const reg::L2Ball<Scalar>& r) { return -r.radius * w.norm(); },
          [&](const reg::Zero&) { return (w.array() == Scalar(0)).all() ? Scalar(0) : ninf; },
      },
      g.variant());
}

}  // namespace xrda
