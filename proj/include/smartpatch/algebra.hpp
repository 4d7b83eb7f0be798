#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace smartpatch {

/// Raised when operand shapes do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense 4x4 matrix of doubles, row-major.
class Mat4 {
 public:
  Mat4() : m_{} {}
  explicit Mat4(const std::array<std::array<double, 4>, 4>& rows);

  static Mat4 identity();

  double& operator()(std::size_t r, std::size_t c) { return m_[r * 4 + c]; }
  double operator()(std::size_t r, std::size_t c) const { return m_[r * 4 + c]; }

  std::array<double, 4> row(std::size_t r) const;
  std::array<double, 4> col(std::size_t c) const;

  Mat4 transposed() const;
  bool all_finite() const;

  friend Mat4 operator*(const Mat4& a, const Mat4& b);
  friend bool operator==(const Mat4& a, const Mat4& b) = default;

 private:
  std::array<double, 16> m_;
};

std::array<double, 4> operator*(const Mat4& a, const std::array<double, 4>& x);
std::array<double, 4> operator*(const std::array<double, 4>& x, const Mat4& a);

/// Gauss-Jordan inverse with partial pivoting. Throws std::domain_error when
/// the matrix is singular to working precision.
Mat4 inverse(const Mat4& m);

double max_abs_diff(const Mat4& a, const Mat4& b);

/// Dense rows x cols matrix of doubles, row-major.
class MatRC {
 public:
  MatRC() = default;
  MatRC(std::size_t rows, std::size_t cols, double fill = 0.0);
  MatRC(std::size_t rows, std::size_t cols, std::vector<double> entries);
  explicit MatRC(const Mat4& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  /// Sub-matrix consisting of the given columns, in the given order.
  MatRC select_cols(std::span<const std::size_t> cols) const;

  friend bool operator==(const MatRC& a, const MatRC& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

MatRC mat_mul(const MatRC& a, const MatRC& b);

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational matrix. Entries are always in lowest terms (the backing
/// rational type normalizes on every operation).
class RationalMat {
 public:
  RationalMat() = default;
  RationalMat(std::size_t rows, std::size_t cols);

  /// Exact conversion from a matrix with integer-valued entries.
  /// Throws std::invalid_argument on a non-integral entry.
  static RationalMat from_integers(const MatRC& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalMat select_cols(std::span<const std::size_t> cols) const;
  RationalMat transposed() const;
  MatRC to_double() const;

  friend bool operator==(const RationalMat& a, const RationalMat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

RationalMat mat_mul(const RationalMat& a, const RationalMat& b);

struct RrefResult {
  RationalMat rref;
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_cols;
};

/// Exact reduced row-echelon form. Pivot selection takes the first row with a
/// nonzero entry in the current column, so pivot columns are deterministic.
/// Throws DimensionError on an empty matrix.
RrefResult rref_exact(const RationalMat& m);

/// Exact inverse of a square nonsingular rational matrix.
RationalMat inverse_exact(const RationalMat& m);

/// True when `row` is a rational combination of the rows of `m`.
bool in_row_space(const RationalMat& m, std::span<const Rational> row);

std::string to_string(const Rational& q);

}  // namespace smartpatch
