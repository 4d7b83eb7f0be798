#include "smartpatch/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smartpatch {

namespace {

RationalMat exact_mat4(const Mat4& m) { return RationalMat::from_integers(MatRC(m)); }

// Index of r_ij (1-based i, j as in the diagonal sums) in the row-major R vector.
constexpr std::size_t r_index(std::size_t i, std::size_t j) { return (i - 1) * 4 + (j - 1); }

// Entries of R summed into the a6, a5, a4 coefficients.
const std::array<std::vector<std::size_t>, 3>& leading_sums() {
  static const std::array<std::vector<std::size_t>, 3> sums{{
      {r_index(1, 1)},
      {r_index(1, 2), r_index(2, 1)},
      {r_index(1, 3), r_index(2, 2), r_index(3, 1)},
  }};
  return sums;
}

// Removes the components of `row` along the pivot columns of an rref matrix.
std::vector<Rational> reduce_against(const RrefResult& red, std::vector<Rational> row) {
  for (std::size_t r = 0; r < red.rank; ++r) {
    const Rational f = row[red.pivot_cols[r]];
    if (f == 0) continue;
    for (std::size_t c = 0; c < row.size(); ++c) row[c] -= f * red.rref(r, c);
  }
  return row;
}

bool is_zero(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

InnerIdentity resolve_inner_identity(const RationalMat& lambda) {
  const RrefResult red = rref_exact(lambda);
  auto inner_row = [](int sign22) {
    std::vector<Rational> row(16);
    row[5] = 1;    // x11
    row[6] = -1;   // x12
    row[9] = -1;   // x21
    row[10] = sign22;  // x22
    return row;
  };
  std::vector<Rational> corner_row(16);
  corner_row[0] = 1;
  corner_row[3] = -1;
  corner_row[12] = -1;
  corner_row[15] = 1;

  // inner + k * corner lies in the row space for exactly one k when the
  // relation holds; the relation then reads inner = -k * corner.
  auto solve_k = [&](int sign22) -> std::optional<Rational> {
    const auto ri = reduce_against(red, inner_row(sign22));
    const auto rc = reduce_against(red, corner_row);
    if (is_zero(rc)) return is_zero(ri) ? std::optional<Rational>(Rational(0)) : std::nullopt;
    std::optional<Rational> k;
    for (std::size_t c = 0; c < 16; ++c) {
      if (rc[c] == 0) {
        if (ri[c] != 0) return std::nullopt;
        continue;
      }
      const Rational kc = -ri[c] / rc[c];
      if (k && *k != kc) return std::nullopt;
      k = kc;
    }
    return k;
  };

  InnerIdentity id;
  const auto plus = solve_k(+1);
  const auto minus = solve_k(-1);
  id.plus_variant_in_row_space = plus.has_value();
  id.minus_variant_in_row_space = minus.has_value();
  if (plus.has_value() == minus.has_value())
    throw InternalError("inner-point relation: sign of x22 not uniquely determined");
  id.inner_sign = plus ? +1 : -1;
  id.corner_coefficient = -(plus ? *plus : *minus);

  std::ostringstream os;
  os << "x11 - x12 - x21 " << (id.inner_sign > 0 ? "+" : "-") << " x22 = "
     << to_string(id.corner_coefficient) << " * (x00 - x03 - x30 + x33)";
  id.equation = os.str();
  return id;
}

Rational exact(double v) { return Rational(v); }

}  // namespace

const char* to_string(DiagonalKind d) { return d == DiagonalKind::Main ? "main" : "anti"; }

// ---------------------------------------------------------------------------

Poly::Poly(std::vector<double> coeffs_high_first) : c_(std::move(coeffs_high_first)) {}

double Poly::coefficient(std::size_t k) const {
  if (k > nominal_degree() || c_.empty()) return 0.0;
  return c_[nominal_degree() - k];
}

std::size_t Poly::effective_degree(double tol) const {
  double scale = 1.0;
  for (double c : c_) scale = std::max(scale, std::abs(c));
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (std::abs(c_[i]) > tol * scale) return nominal_degree() - i;
  return 0;
}

double Poly::operator()(double t) const {
  double s = 0.0;
  for (double c : c_) s = s * t + c;
  return s;
}

Mat4 diagonal_matrix(const ScalarGrid& g, DiagonalKind d) {
  const Mat4 m = bezier_basis();
  Mat4 r = m.transposed() * g.as_matrix() * m;
  if (d == DiagonalKind::Anti) r = r * reparam_T();
  return r;
}

Poly collapse_diagonal(const ScalarGrid& g, DiagonalKind d) {
  const Mat4 r = diagonal_matrix(g, d);
  // u^T R u with u = [u^3, u^2, u, 1]: entry (i, j) multiplies u^(6 - i - j).
  std::vector<double> a(7, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) a[i + j] += r(i, j);
  return Poly(std::move(a));
}

RationalMat build_omega_exact(DiagonalKind d) {
  const RationalMat m = exact_mat4(bezier_basis());
  const RationalMat mt = m.transposed();
  const RationalMat t = exact_mat4(reparam_T());
  RationalMat omega(16, 16);
  for (std::size_t k = 0; k < 16; ++k) {
    RationalMat unit(4, 4);
    unit(k / 4, k % 4) = 1;
    RationalMat r = mat_mul(mat_mul(mt, unit), m);
    if (d == DiagonalKind::Anti) r = mat_mul(r, t);
    for (std::size_t e = 0; e < 16; ++e) omega(e, k) = r(e / 4, e % 4);
  }
  return omega;
}

MatRC build_omega(DiagonalKind d) { return build_omega_exact(d).to_double(); }

MatRC reference_lambda() {
  return MatRC(6, 16, {
      1,  -3,  3,   -1, -3,  9,   -9,  3,   3,  -9,  9,   -3,  -1, 3,  -3, 1,
      -6, 15,  -12, 3,  15,  -36, 27,  -6,  -12, 27, -18, 3,   3,  -6, 3,  0,
      15, -30, 18,  -3, -30, 54,  -27, 3,   18, -27, 9,   0,   -3, 3,  0,  0,
      -1, 3,   -3,  1,  3,   -9,  9,   -3,  -3, 9,   -9,  3,   1,  -3, 3,  -1,
      3,  -12, 15,  -6, -6,  27,  -36, 15,  3,  -18, 27,  -12, 0,  3,  -6, 3,
      -3, 18,  -30, 15, 3,   -27, 54,  -30, 0,  9,   -27, 18,  0,  0,  3,  -3,
  });
}

ConstraintSystem build_lambda() {
  ConstraintSystem sys;
  sys.lambda_exact = RationalMat(6, 16);
  const std::array<DiagonalKind, 2> kinds{DiagonalKind::Main, DiagonalKind::Anti};
  for (std::size_t d = 0; d < 2; ++d) {
    const RationalMat omega = build_omega_exact(kinds[d]);
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t e : leading_sums()[k])
        for (std::size_t c = 0; c < 16; ++c) sys.lambda_exact(d * 3 + k, c) += omega(e, c);
  }
  sys.lambda = sys.lambda_exact.to_double();
  sys.lambda1 = sys.lambda.select_cols(kCornerIndices);
  sys.lambda2 = sys.lambda.select_cols(kInteriorIndices);

  const RrefResult full = rref_exact(sys.lambda_exact);
  sys.rank = full.rank;
  sys.rref = full.rref;
  sys.pivot_cols = full.pivot_cols;
  if (sys.rank != 5) {
    std::ostringstream os;
    os << "derived constraint matrix has rank " << sys.rank << ", expected 5";
    throw InternalError(os.str());
  }

  // [lambda2 | lambda1]: the rref of the left block is the rref of lambda2.
  std::array<std::size_t, 16> order{};
  std::copy(kInteriorIndices.begin(), kInteriorIndices.end(), order.begin());
  std::copy(kCornerIndices.begin(), kCornerIndices.end(), order.begin() + 12);
  const RrefResult reduced = rref_exact(sys.lambda_exact.select_cols(order));
  sys.reduced_rank = reduced.rank;
  sys.reduced_pivots = reduced.pivot_cols;
  if (sys.reduced_rank != 5 || sys.reduced_pivots.back() >= 12)
    throw InternalError("reduced system is inconsistent for some corner choice");
  for (std::size_t c = 0; c < 12; ++c)
    if (std::find(sys.reduced_pivots.begin(), sys.reduced_pivots.end(), c) ==
        sys.reduced_pivots.end())
      sys.free_cols.push_back(c);
  if (sys.free_cols.size() != 7) throw InternalError("expected seven free interior values");

  sys.reduced_rref = RationalMat(5, 16);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 16; ++c) sys.reduced_rref(r, c) = reduced.rref(r, c);

  // Projection: xi2' = xi2 - B^T (B B^T)^-1 (B xi2 + C xi1).
  RationalMat b(5, 12), cm(5, 4);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 12; ++c) b(r, c) = sys.reduced_rref(r, c);
    for (std::size_t c = 0; c < 4; ++c) cm(r, c) = sys.reduced_rref(r, 12 + c);
  }
  const RationalMat bt = b.transposed();
  const RationalMat pinv = mat_mul(bt, inverse_exact(mat_mul(b, bt)));  // 12 x 5
  const RationalMat pb = mat_mul(pinv, b);
  const RationalMat pc = mat_mul(pinv, cm);
  sys.projector = RationalMat(12, 12);
  sys.corner_map = RationalMat(12, 4);
  for (std::size_t r = 0; r < 12; ++r) {
    for (std::size_t c = 0; c < 12; ++c) sys.projector(r, c) = (r == c ? 1 : 0) - pb(r, c);
    for (std::size_t c = 0; c < 4; ++c) sys.corner_map(r, c) = -pc(r, c);
  }

  sys.inner_identity = resolve_inner_identity(sys.lambda_exact);
  return sys;
}

const ConstraintSystem& constraint_system() {
  static const ConstraintSystem sys = build_lambda();
  return sys;
}

// ---------------------------------------------------------------------------

ConstraintReport bs_residuals(const ScalarGrid& g, double tol) {
  ConstraintReport rep;
  rep.tolerance_used = tol;
  const double scale = g.scale();
  const std::array<DiagonalKind, 2> kinds{DiagonalKind::Main, DiagonalKind::Anti};
  for (std::size_t d = 0; d < 2; ++d) {
    const Poly p = collapse_diagonal(g, kinds[d]);
    DiagonalResidual& res = rep.per_diagonal[d];
    res.kind = kinds[d];
    for (std::size_t k = 0; k < 3; ++k) {
      res.leading[k] = p.coeffs()[k];
      res.relative[k] = std::abs(res.leading[k]) / scale;
      rep.max_residual = std::max(rep.max_residual, res.relative[k]);
    }
  }
  rep.compliant = rep.max_residual <= tol;
  return rep;
}

ScalarGrid bs_solve(const std::array<double, 4>& corners, const std::array<double, 7>& free) {
  const ConstraintSystem& sys = constraint_system();
  std::array<Rational, 12> interior;
  for (std::size_t f = 0; f < 7; ++f) interior[sys.free_cols[f]] = exact(free[f]);
  std::array<Rational, 4> xi1;
  for (std::size_t k = 0; k < 4; ++k) xi1[k] = exact(corners[k]);

  for (std::size_t r = 0; r < sys.reduced_rank; ++r) {
    Rational s = 0;
    for (std::size_t f : sys.free_cols) s -= sys.reduced_rref(r, f) * interior[f];
    for (std::size_t k = 0; k < 4; ++k) s -= sys.reduced_rref(r, 12 + k) * xi1[k];
    interior[sys.reduced_pivots[r]] = s;
  }

  ScalarGrid g;
  for (std::size_t k = 0; k < 4; ++k) g.values()[kCornerIndices[k]] = corners[k];
  for (std::size_t c = 0; c < 12; ++c)
    g.values()[kInteriorIndices[c]] = interior[c].convert_to<double>();
  return g;
}

ScalarGrid bs_project(const ScalarGrid& g) {
  const ConstraintSystem& sys = constraint_system();
  std::array<Rational, 12> xi2;
  std::array<Rational, 4> xi1;
  for (std::size_t c = 0; c < 12; ++c) xi2[c] = exact(g.values()[kInteriorIndices[c]]);
  for (std::size_t k = 0; k < 4; ++k) xi1[k] = exact(g.values()[kCornerIndices[k]]);

  ScalarGrid out = g;
  for (std::size_t r = 0; r < 12; ++r) {
    Rational s = 0;
    for (std::size_t c = 0; c < 12; ++c)
      if (sys.projector(r, c) != 0) s += sys.projector(r, c) * xi2[c];
    for (std::size_t k = 0; k < 4; ++k)
      if (sys.corner_map(r, k) != 0) s += sys.corner_map(r, k) * xi1[k];
    out.values()[kInteriorIndices[r]] = s.convert_to<double>();
  }
  return out;
}

double bs_inner_identity(const ScalarGrid& g) {
  const InnerIdentity& id = constraint_system().inner_identity;
  const double inner = g(1, 1) - g(1, 2) - g(2, 1) + id.inner_sign * g(2, 2);
  const double corner = g(0, 0) - g(0, 3) - g(3, 0) + g(3, 3);
  return inner - id.corner_coefficient.convert_to<double>() * corner;
}

// ---------------------------------------------------------------------------

double hs_phi(const HermiteGrid& h) { return h.h(1, 1) - h.h(1, 2) - h.h(2, 1) + h.h(2, 2); }

HsTwists hs_twists(double phi, double alpha, double beta) {
  return {2.0 * phi * (1.0 - alpha), 2.0 * phi * (1.0 - beta), 2.0 * phi * beta,
          2.0 * phi * alpha};
}

namespace {

double hs_a(const HermiteGrid& h) { return h.h(1, 4) - h.h(2, 4) + h.h(4, 1) - h.h(4, 2); }
double hs_b(const HermiteGrid& h) { return h.h(1, 3) - h.h(2, 3) + h.h(4, 1) - h.h(4, 2); }

bool phi_degenerate(const HermiteGrid& h, double phi) {
  return std::abs(phi) <= kPhiDegeneracy * h.raw().scale();
}

}  // namespace

std::optional<AlphaBeta> hs_alpha_beta(const HermiteGrid& h) {
  const double phi = hs_phi(h);
  if (phi_degenerate(h, phi)) return std::nullopt;
  return AlphaBeta{-(hs_a(h) + phi) / (2.0 * phi), -(hs_b(h) + phi) / (2.0 * phi)};
}

HsReport hs_validate(const HermiteGrid& h, double tol) {
  HsReport rep;
  rep.tolerance_used = tol;
  const double phi = hs_phi(h);
  rep.phi = phi;
  rep.twist_sum_residuals = {h.h(3, 3) + h.h(4, 4) - 2.0 * phi, h.h(3, 4) + h.h(4, 3) - 2.0 * phi};
  const double tangents = h.h(3, 1) - h.h(3, 2) + h.h(4, 1) - h.h(4, 2) + h.h(1, 4) - h.h(2, 4) -
                          h.h(2, 3) + h.h(1, 3);
  rep.tangent_residual = tangents + 4.0 * phi;
  rep.split_residuals = {hs_b(h) + h.h(4, 3) + phi, hs_a(h) + h.h(4, 4) + phi};
  rep.degenerate_phi = phi_degenerate(h, phi);
  if (auto ab = hs_alpha_beta(h)) {
    rep.alpha = ab->alpha;
    rep.beta = ab->beta;
  }
  const double limit = tol * h.raw().scale();
  rep.compliant = std::abs(rep.twist_sum_residuals[0]) <= limit &&
                  std::abs(rep.twist_sum_residuals[1]) <= limit &&
                  std::abs(rep.tangent_residual) <= limit;
  rep.bs_equivalent = rep.compliant && std::abs(rep.split_residuals[0]) <= limit &&
                      std::abs(rep.split_residuals[1]) <= limit;
  return rep;
}

bool hs_fill_twists(HermiteGrid& h) {
  const auto ab = hs_alpha_beta(h);
  if (!ab) return false;
  const HsTwists t = hs_twists(hs_phi(h), ab->alpha, ab->beta);
  h.h(3, 3) = t.x33;
  h.h(3, 4) = t.x34;
  h.h(4, 3) = t.x43;
  h.h(4, 4) = t.x44;
  return true;
}

}  // namespace smartpatch
