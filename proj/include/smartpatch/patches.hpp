#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "smartpatch/algebra.hpp"

namespace smartpatch {

/// Raised when a parameter lies outside the unit domain in strict mode.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class DomainMode { Strict, Extrapolate };

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Point3 a, Point3 b) { return norm(a - b); }

/// 4x4 control values of one coordinate, indexed [i][j] with i along u and j
/// along v. Corners are (0,0), (0,3), (3,0), (3,3).
class ScalarGrid {
 public:
  ScalarGrid() : v_{} {}
  explicit ScalarGrid(const std::array<double, 16>& row_major);
  explicit ScalarGrid(const std::array<std::array<double, 4>, 4>& rows);

  static ScalarGrid constant(double c);

  double& operator()(std::size_t i, std::size_t j) { return v_[i * 4 + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * 4 + j]; }

  /// Row-major values; this is the xi ordering x00, x01, ..., x33.
  const std::array<double, 16>& values() const { return v_; }
  std::array<double, 16>& values() { return v_; }

  /// x00, x03, x30, x33
  std::array<double, 4> corners() const { return {v_[0], v_[3], v_[12], v_[15]}; }

  Mat4 as_matrix() const;
  double max_abs() const;
  /// max(1, max |value|): the reference magnitude for relative tolerances.
  double scale() const;
  bool all_finite() const;

  friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;

 private:
  std::array<double, 16> v_;
};

/// Hermite coefficient block for one coordinate, addressed with the 1-based
/// h(i, j) convention:
///   h11 = P(0,0)   h12 = P(0,1)   h13, h14 = v-tangents at P(0,0), P(0,1)
///   h21 = P(1,0)   h22 = P(1,1)   h23, h24 = v-tangents at P(1,0), P(1,1)
///   h31, h32 = u-tangents at P(0,0), P(0,1);  h33, h34 = twists there
///   h41, h42 = u-tangents at P(1,0), P(1,1);  h43, h44 = twists there
class HermiteGrid {
 public:
  HermiteGrid() = default;
  explicit HermiteGrid(const ScalarGrid& raw) : g_(raw) {}

  double& h(std::size_t i, std::size_t j) { return g_(i - 1, j - 1); }
  double h(std::size_t i, std::size_t j) const { return g_(i - 1, j - 1); }

  const ScalarGrid& raw() const { return g_; }
  ScalarGrid& raw() { return g_; }

  friend bool operator==(const HermiteGrid&, const HermiteGrid&) = default;

 private:
  ScalarGrid g_;
};

struct BezierPatch {
  ScalarGrid x, y, z;

  ScalarGrid& coord(std::size_t c) { return c == 0 ? x : (c == 1 ? y : z); }
  const ScalarGrid& coord(std::size_t c) const { return c == 0 ? x : (c == 1 ? y : z); }
  Point3 control_point(std::size_t i, std::size_t j) const { return {x(i, j), y(i, j), z(i, j)}; }
  double scale() const;

  friend bool operator==(const BezierPatch&, const BezierPatch&) = default;
};

struct HermitePatch {
  HermiteGrid x, y, z;

  HermiteGrid& coord(std::size_t c) { return c == 0 ? x : (c == 1 ? y : z); }
  const HermiteGrid& coord(std::size_t c) const { return c == 0 ? x : (c == 1 ? y : z); }

  friend bool operator==(const HermitePatch&, const HermitePatch&) = default;
};

/// Cubic Bezier basis in monomial form: p(t) = p^T * M * [t^3, t^2, t, 1]^T.
Mat4 bezier_basis();

/// Substitution matrix for v = 1 - u: monomials(1 - u) = T * monomials(u).
Mat4 reparam_T();

std::array<double, 4> monomials(double t);
/// d/dt of monomials(t)
std::array<double, 4> monomial_derivatives(double t);

double eval_curve(std::span<const double, 4> p, double t, DomainMode mode = DomainMode::Strict);

double eval_grid(const ScalarGrid& g, double u, double v, DomainMode mode = DomainMode::Strict);
Point3 eval_patch(const BezierPatch& patch, double u, double v, DomainMode mode = DomainMode::Strict);

/// First partial derivatives of the patch.
Point3 eval_partial_u(const BezierPatch& patch, double u, double v, DomainMode mode = DomainMode::Strict);
Point3 eval_partial_v(const BezierPatch& patch, double u, double v, DomainMode mode = DomainMode::Strict);

ScalarGrid hermite_to_bezier(const HermiteGrid& h);
HermiteGrid bezier_to_hermite(const ScalarGrid& b);
BezierPatch hermite_to_bezier(const HermitePatch& h);
HermitePatch bezier_to_hermite(const BezierPatch& b);

}  // namespace smartpatch
