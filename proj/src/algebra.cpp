#include "smartpatch/algebra.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace smartpatch {

Mat4::Mat4(const std::array<std::array<double, 4>, 4>& rows) {
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) m_[r * 4 + c] = rows[r][c];
}

Mat4 Mat4::identity() {
  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
  return m;
}

std::array<double, 4> Mat4::row(std::size_t r) const {
  return {m_[r * 4], m_[r * 4 + 1], m_[r * 4 + 2], m_[r * 4 + 3]};
}

std::array<double, 4> Mat4::col(std::size_t c) const {
  return {m_[c], m_[4 + c], m_[8 + c], m_[12 + c]};
}

Mat4 Mat4::transposed() const {
  Mat4 t;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Mat4::all_finite() const {
  for (double v : m_)
    if (!std::isfinite(v)) return false;
  return true;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 p;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a(r, k) * b(k, c);
      p(r, c) = s;
    }
  return p;
}

std::array<double, 4> operator*(const Mat4& a, const std::array<double, 4>& x) {
  std::array<double, 4> y{};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t k = 0; k < 4; ++k) y[r] += a(r, k) * x[k];
  return y;
}

std::array<double, 4> operator*(const std::array<double, 4>& x, const Mat4& a) {
  std::array<double, 4> y{};
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t k = 0; k < 4; ++k) y[c] += x[k] * a(k, c);
  return y;
}

Mat4 inverse(const Mat4& m) {
  Mat4 a = m;
  Mat4 inv = Mat4::identity();
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 4; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-14) throw std::domain_error("inverse: singular matrix");
    if (piv != col)
      for (std::size_t c = 0; c < 4; ++c) {
        std::swap(a(piv, c), a(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    const double d = a(col, col);
    for (std::size_t c = 0; c < 4; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (std::size_t r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < 4; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

double max_abs_diff(const Mat4& a, const Mat4& b) {
  double m = 0.0;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

// ---------------------------------------------------------------------------

MatRC::MatRC(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

MatRC::MatRC(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols)
    throw DimensionError("MatRC: entry count does not match shape");
  for (double v : data_)
    if (!std::isfinite(v)) throw std::invalid_argument("MatRC: non-finite entry");
}

MatRC::MatRC(const Mat4& m) : rows_(4), cols_(4), data_(16) {
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) data_[r * 4 + c] = m(r, c);
}

MatRC MatRC::select_cols(std::span<const std::size_t> cols) const {
  MatRC s(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] >= cols_) throw DimensionError("select_cols: column out of range");
      s(r, j) = (*this)(r, cols[j]);
    }
  return s;
}

MatRC mat_mul(const MatRC& a, const MatRC& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "mat_mul: " << a.rows() << "x" << a.cols() << " times " << b.rows() << "x" << b.cols();
    throw DimensionError(os.str());
  }
  MatRC p(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double f = a(r, k);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) p(r, c) += f * b(k, c);
    }
  return p;
}

// ---------------------------------------------------------------------------

RationalMat::RationalMat(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

RationalMat RationalMat::from_integers(const MatRC& m) {
  RationalMat q(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (v != std::trunc(v) || std::abs(v) > 9.0e15)
        throw std::invalid_argument("RationalMat::from_integers: non-integral entry");
      q(r, c) = Rational(static_cast<long long>(v));
    }
  return q;
}

RationalMat RationalMat::select_cols(std::span<const std::size_t> cols) const {
  RationalMat s(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] >= cols_) throw DimensionError("select_cols: column out of range");
      s(r, j) = (*this)(r, cols[j]);
    }
  return s;
}

RationalMat RationalMat::transposed() const {
  RationalMat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

MatRC RationalMat::to_double() const {
  MatRC d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) d(r, c) = (*this)(r, c).convert_to<double>();
  return d;
}

RationalMat mat_mul(const RationalMat& a, const RationalMat& b) {
  if (a.cols() != b.rows()) throw DimensionError("mat_mul: inner dimensions differ");
  RationalMat p(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Rational& f = a(r, k);
      if (f == 0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) p(r, c) += f * b(k, c);
    }
  return p;
}

RrefResult rref_exact(const RationalMat& m) {
  if (m.empty()) throw DimensionError("rref_exact: empty matrix");
  RrefResult out{m, 0, {}};
  RationalMat& a = out.rref;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::size_t lead = 0;
  for (std::size_t col = 0; col < cols && lead < rows; ++col) {
    std::size_t piv = lead;
    while (piv < rows && a(piv, col) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != lead)
      for (std::size_t c = 0; c < cols; ++c) std::swap(a(piv, c), a(lead, c));
    const Rational d = a(lead, col);
    for (std::size_t c = col; c < cols; ++c) a(lead, c) /= d;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == lead || a(r, col) == 0) continue;
      const Rational f = a(r, col);
      for (std::size_t c = col; c < cols; ++c) a(r, c) -= f * a(lead, c);
    }
    out.pivot_cols.push_back(col);
    ++lead;
  }
  out.rank = lead;
  return out;
}

RationalMat inverse_exact(const RationalMat& m) {
  if (m.rows() != m.cols() || m.empty()) throw DimensionError("inverse_exact: not square");
  const std::size_t n = m.rows();
  RationalMat aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    aug(r, n + r) = 1;
  }
  const RrefResult red = rref_exact(aug);
  if (red.rank < n || red.pivot_cols[n - 1] != n - 1)
    throw std::domain_error("inverse_exact: singular matrix");
  RationalMat inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = red.rref(r, n + c);
  return inv;
}

bool in_row_space(const RationalMat& m, std::span<const Rational> row) {
  if (row.size() != m.cols()) throw DimensionError("in_row_space: row length mismatch");
  RationalMat ext(m.rows() + 1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) ext(r, c) = m(r, c);
  for (std::size_t c = 0; c < m.cols(); ++c) ext(m.rows(), c) = row[c];
  return rref_exact(ext).rank == rref_exact(m).rank;
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

}  // namespace smartpatch
