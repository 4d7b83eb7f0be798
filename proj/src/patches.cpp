#include "smartpatch/patches.hpp"

#include <algorithm>
#include <sstream>

namespace smartpatch {

namespace {

void check_domain(double t, DomainMode mode, const char* what) {
  if (mode == DomainMode::Strict && !(t >= 0.0 && t <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << t << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

const Mat4& basis() {
  static const Mat4 m = bezier_basis();
  return m;
}

// u^T M^T X M v with arbitrary monomial-like vectors on both sides.
double bilinear_form(const ScalarGrid& g, const std::array<double, 4>& left,
                     const std::array<double, 4>& right) {
  const std::array<double, 4> bl = basis() * left;
  const std::array<double, 4> br = basis() * right;
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) s += bl[i] * g(i, j) * br[j];
  return s;
}

}  // namespace

ScalarGrid::ScalarGrid(const std::array<double, 16>& row_major) : v_(row_major) {}

ScalarGrid::ScalarGrid(const std::array<std::array<double, 4>, 4>& rows) {
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) v_[i * 4 + j] = rows[i][j];
}

ScalarGrid ScalarGrid::constant(double c) {
  ScalarGrid g;
  g.v_.fill(c);
  return g;
}

Mat4 ScalarGrid::as_matrix() const {
  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double ScalarGrid::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarGrid::scale() const { return std::max(1.0, max_abs()); }

bool ScalarGrid::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double v) { return std::isfinite(v); });
}

double BezierPatch::scale() const {
  return std::max({x.scale(), y.scale(), z.scale()});
}

Mat4 bezier_basis() {
  return Mat4({{{-1, 3, -3, 1}, {3, -6, 3, 0}, {-3, 3, 0, 0}, {1, 0, 0, 0}}});
}

Mat4 reparam_T() {
  return Mat4({{{-1, 3, -3, 1}, {0, 1, -2, 1}, {0, 0, -1, 1}, {0, 0, 0, 1}}});
}

std::array<double, 4> monomials(double t) { return {t * t * t, t * t, t, 1.0}; }

std::array<double, 4> monomial_derivatives(double t) { return {3.0 * t * t, 2.0 * t, 1.0, 0.0}; }

double eval_curve(std::span<const double, 4> p, double t, DomainMode mode) {
  check_domain(t, mode, "t");
  const std::array<double, 4> b = basis() * monomials(t);
  return p[0] * b[0] + p[1] * b[1] + p[2] * b[2] + p[3] * b[3];
}

double eval_grid(const ScalarGrid& g, double u, double v, DomainMode mode) {
  check_domain(u, mode, "u");
  check_domain(v, mode, "v");
  return bilinear_form(g, monomials(u), monomials(v));
}

Point3 eval_patch(const BezierPatch& patch, double u, double v, DomainMode mode) {
  check_domain(u, mode, "u");
  check_domain(v, mode, "v");
  const auto mu = monomials(u);
  const auto mv = monomials(v);
  return {bilinear_form(patch.x, mu, mv), bilinear_form(patch.y, mu, mv),
          bilinear_form(patch.z, mu, mv)};
}

Point3 eval_partial_u(const BezierPatch& patch, double u, double v, DomainMode mode) {
  check_domain(u, mode, "u");
  check_domain(v, mode, "v");
  const auto du = monomial_derivatives(u);
  const auto mv = monomials(v);
  return {bilinear_form(patch.x, du, mv), bilinear_form(patch.y, du, mv),
          bilinear_form(patch.z, du, mv)};
}

Point3 eval_partial_v(const BezierPatch& patch, double u, double v, DomainMode mode) {
  check_domain(u, mode, "u");
  check_domain(v, mode, "v");
  const auto mu = monomials(u);
  const auto dv = monomial_derivatives(v);
  return {bilinear_form(patch.x, mu, dv), bilinear_form(patch.y, mu, dv),
          bilinear_form(patch.z, mu, dv)};
}

// The twist terms of the two diagonal inner points (x11, x22) enter with +1/9:
// that is the only sign for which this map inverts bezier_to_hermite.
ScalarGrid hermite_to_bezier(const HermiteGrid& hg) {
  auto h = [&](std::size_t i, std::size_t j) { return hg.h(i, j); };
  constexpr double third = 1.0 / 3.0;
  constexpr double ninth = 1.0 / 9.0;
  ScalarGrid b;
  b(0, 0) = h(1, 1);
  b(0, 1) = h(1, 1) + third * h(1, 3);
  b(0, 2) = h(1, 2) - third * h(1, 4);
  b(0, 3) = h(1, 2);

  b(1, 0) = h(1, 1) + third * h(3, 1);
  b(1, 1) = h(1, 1) + third * (h(1, 3) + h(3, 1)) + ninth * h(3, 3);
  b(1, 2) = h(1, 2) + third * (h(3, 2) - h(1, 4)) - ninth * h(3, 4);
  b(1, 3) = h(1, 2) + third * h(3, 2);

  b(2, 0) = h(2, 1) - third * h(4, 1);
  b(2, 1) = h(2, 1) + third * (h(2, 3) - h(4, 1)) - ninth * h(4, 3);
  b(2, 2) = h(2, 2) - third * (h(2, 4) + h(4, 2)) + ninth * h(4, 4);
  b(2, 3) = h(2, 2) - third * h(4, 2);

  b(3, 0) = h(2, 1);
  b(3, 1) = h(2, 1) + third * h(2, 3);
  b(3, 2) = h(2, 2) - third * h(2, 4);
  b(3, 3) = h(2, 2);
  return b;
}

HermiteGrid bezier_to_hermite(const ScalarGrid& x) {
  HermiteGrid hg;
  auto h = [&](std::size_t i, std::size_t j) -> double& { return hg.h(i, j); };
  h(1, 1) = x(0, 0);
  h(1, 2) = x(0, 3);
  h(1, 3) = 3.0 * (x(0, 1) - x(0, 0));
  h(1, 4) = 3.0 * (x(0, 3) - x(0, 2));

  h(2, 1) = x(3, 0);
  h(2, 2) = x(3, 3);
  h(2, 3) = 3.0 * (x(3, 1) - x(3, 0));
  h(2, 4) = 3.0 * (x(3, 3) - x(3, 2));

  h(3, 1) = 3.0 * (x(1, 0) - x(0, 0));
  h(3, 2) = 3.0 * (x(1, 3) - x(0, 3));
  h(3, 3) = 9.0 * (x(0, 0) - x(0, 1) - x(1, 0) + x(1, 1));
  h(3, 4) = 9.0 * (x(0, 2) - x(0, 3) - x(1, 2) + x(1, 3));

  h(4, 1) = 3.0 * (x(3, 0) - x(2, 0));
  h(4, 2) = 3.0 * (x(3, 3) - x(2, 3));
  h(4, 3) = 9.0 * (x(2, 0) - x(2, 1) - x(3, 0) + x(3, 1));
  h(4, 4) = 9.0 * (x(2, 2) - x(2, 3) - x(3, 2) + x(3, 3));
  return hg;
}

BezierPatch hermite_to_bezier(const HermitePatch& h) {
  return {hermite_to_bezier(h.x), hermite_to_bezier(h.y), hermite_to_bezier(h.z)};
}

HermitePatch bezier_to_hermite(const BezierPatch& b) {
  return {bezier_to_hermite(b.x), bezier_to_hermite(b.y), bezier_to_hermite(b.z)};
}

}  // namespace smartpatch
