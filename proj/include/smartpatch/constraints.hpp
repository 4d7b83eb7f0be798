#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smartpatch/algebra.hpp"
#include "smartpatch/patches.hpp"

namespace smartpatch {

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr double kPhiDegeneracy = 1e-12;

/// Raised when a derived constraint structure disagrees with its expected shape.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class DiagonalKind { Main, Anti };  // v = u, v = 1 - u

const char* to_string(DiagonalKind d);

/// Univariate polynomial, coefficients stored highest degree first.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> coeffs_high_first);

  const std::vector<double>& coeffs() const { return c_; }
  std::size_t nominal_degree() const { return c_.empty() ? 0 : c_.size() - 1; }

  /// Coefficient of t^k.
  double coefficient(std::size_t k) const;

  /// Degree after dropping leading coefficients with |c| <= tol * max(1, max|c|).
  std::size_t effective_degree(double tol) const;

  double operator()(double t) const;

 private:
  std::vector<double> c_;
};

/// R = M^T X M for the main diagonal, R = M^T X M T for the anti-diagonal.
Mat4 diagonal_matrix(const ScalarGrid& g, DiagonalKind d);

/// Degree-6 polynomial traced by the grid along the chosen diagonal.
Poly collapse_diagonal(const ScalarGrid& g, DiagonalKind d);

/// Linear map from the row-major grid values to the row-major entries of R.
RationalMat build_omega_exact(DiagonalKind d);
MatRC build_omega(DiagonalKind d);

/// Column indices of the corner values inside the row-major grid vector.
inline constexpr std::array<std::size_t, 4> kCornerIndices{0, 3, 12, 15};
/// Column indices of the remaining twelve values, in reduced-system order:
/// x01 x02 x10 x11 x12 x13 x20 x21 x22 x23 x31 x32.
inline constexpr std::array<std::size_t, 12> kInteriorIndices{1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 13, 14};

/// The inner-point relation implied by the constraint set:
///   x11 - x12 - x21 + inner_sign * x22 = corner_coefficient * (x00 - x03 - x30 + x33)
struct InnerIdentity {
  int inner_sign = 0;
  Rational corner_coefficient;
  bool plus_variant_in_row_space = false;
  bool minus_variant_in_row_space = false;
  std::string equation;
};

struct ConstraintSystem {
  RationalMat lambda_exact;  // 6 x 16; rows 0-2 main diagonal, rows 3-5 anti-diagonal
  MatRC lambda;
  MatRC lambda1;  // corner columns
  MatRC lambda2;  // kInteriorIndices columns
  std::size_t rank = 0;
  RationalMat rref;  // of lambda
  std::vector<std::size_t> pivot_cols;

  // Reduced system lambda2 * xi2 = -lambda1 * xi1.
  RationalMat reduced_rref;  // rref of [lambda2 | lambda1], rank rows only
  std::size_t reduced_rank = 0;
  std::vector<std::size_t> reduced_pivots;  // into the twelve interior slots
  std::vector<std::size_t> free_cols;       // into the twelve interior slots

  // Least-squares projection onto the constraint set with corners fixed:
  //   xi2' = projector * xi2 + corner_map * xi1
  RationalMat projector;   // 12 x 12
  RationalMat corner_map;  // 12 x 4

  InnerIdentity inner_identity;
};

/// Derives the system from the Bezier basis, certifies rank 5 and the
/// consistency of the reduced system. Throws InternalError otherwise.
ConstraintSystem build_lambda();

/// Process-wide instance, built on first use.
const ConstraintSystem& constraint_system();

/// Integer table the derived lambda is required to reproduce.
MatRC reference_lambda();

struct DiagonalResidual {
  DiagonalKind kind = DiagonalKind::Main;
  std::array<double, 3> leading{};   // a6, a5, a4
  std::array<double, 3> relative{};  // |a_k| / scale
};

struct ConstraintReport {
  std::array<DiagonalResidual, 2> per_diagonal{};
  double max_residual = 0.0;
  bool compliant = false;
  double tolerance_used = kDefaultTolerance;
};

ConstraintReport bs_residuals(const ScalarGrid& g, double tol = kDefaultTolerance);

/// Grid with the given corners (x00, x03, x30, x33) whose free interior slots
/// (ConstraintSystem::free_cols, in order) take `free`; the pivot slots are
/// solved exactly in rational arithmetic.
ScalarGrid bs_solve(const std::array<double, 4>& corners, const std::array<double, 7>& free);

/// Closest compliant grid (least squares over the twelve non-corner values)
/// with the corners held fixed.
ScalarGrid bs_project(const ScalarGrid& g);

/// Residual of the inner-point relation, using the sign resolved from the
/// constraint row space.
double bs_inner_identity(const ScalarGrid& g);

// --- Hermite form ----------------------------------------------------------

double hs_phi(const HermiteGrid& h);

struct HsTwists {
  double x33 = 0.0, x34 = 0.0, x43 = 0.0, x44 = 0.0;
};

HsTwists hs_twists(double phi, double alpha, double beta);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

/// alpha, beta from the boundary data; nullopt when phi is degenerate.
std::optional<AlphaBeta> hs_alpha_beta(const HermiteGrid& h);

struct HsReport {
  double phi = 0.0;
  std::array<double, 2> twist_sum_residuals{};  // x33 + x44 - 2 phi, x34 + x43 - 2 phi
  double tangent_residual = 0.0;                // tangent sum + 4 phi
  std::array<double, 2> split_residuals{};      // b + x43 + phi, a + x44 + phi
  std::optional<double> alpha;
  std::optional<double> beta;
  bool degenerate_phi = false;
  bool compliant = false;      // twist sums and tangent condition
  bool bs_equivalent = false;  // additionally the twist split; equivalent to the Bezier constraint
  double tolerance_used = kDefaultTolerance;
};

HsReport hs_validate(const HermiteGrid& h, double tol = kDefaultTolerance);

/// Writes the twist block of `h` from alpha, beta computed off its boundary
/// data, making it satisfy both the twist sums and the twist split.
/// Returns false (leaving h untouched) when phi is degenerate.
bool hs_fill_twists(HermiteGrid& h);

}  // namespace smartpatch
