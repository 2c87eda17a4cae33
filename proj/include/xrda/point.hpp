#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>

#include "xrda/errors.hpp"

namespace xrda {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct PrimalSpace {};
struct DualSpace {};

/// A dense coordinate vector tagged with the space it lives in.
///
/// Primal points (elements of the feasible set in V) and dual points
/// (subgradients, mirror images x~ = grad phi(x) in V*) share storage but
/// are distinct types, so a dual vector cannot be passed where a primal one
/// is expected without an explicit conversion through a mirror map.
template <typename Scalar, typename Space>
class Point {
 public:
  using scalar_type = Scalar;
  using vector_type = Vector<Scalar>;

  Point() = default;
  explicit Point(vector_type coords) : coords_(std::move(coords)) {}

  static Point zero(Eigen::Index dim) { return Point(vector_type::Zero(dim)); }

  [[nodiscard]] const vector_type& coords() const { return coords_; }
  vector_type& coords() { return coords_; }
  [[nodiscard]] Eigen::Index dim() const { return coords_.size(); }
  Scalar operator[](Eigen::Index i) const { return coords_[i]; }

  [[nodiscard]] bool all_finite() const { return coords_.allFinite(); }

  friend bool operator==(const Point& a, const Point& b) {
    return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
  }

 private:
  vector_type coords_;
};

template <typename Scalar>
using PrimalPoint = Point<Scalar, PrimalSpace>;

template <typename Scalar>
using DualPoint = Point<Scalar, DualSpace>;

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace xrda
