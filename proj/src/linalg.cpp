#include "qcov/linalg.hpp"

namespace qcov {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = QPiScalar(1);
  return m;
}

std::vector<QPiScalar> Matrix::column(int c) const {
  std::vector<QPiScalar> v(static_cast<size_t>(rows_));
  for (int r = 0; r < rows_; ++r) v[static_cast<size_t>(r)] = (*this)(r, c);
  return v;
}

void Matrix::set_column(int c, const std::vector<QPiScalar>& v) {
  for (int r = 0; r < rows_; ++r) (*this)(r, c) = v[static_cast<size_t>(r)];
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) throw DimensionMismatch("matrix product shape mismatch");
  Matrix out(rows_, o.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = 0; k < cols_; ++k) {
      const QPiScalar& x = (*this)(r, k);
      if (x.is_zero()) continue;
      for (int c = 0; c < o.cols_; ++c) {
        const QPiScalar& y = o(k, c);
        if (!y.is_zero()) out(r, c) += x * y;
      }
    }
  return out;
}

Matrix Matrix::operator+(const Matrix& o) const {
  Matrix out = *this;
  for (size_t k = 0; k < a_.size(); ++k) out.a_[k] += o.a_[k];
  return out;
}

Matrix Matrix::operator-(const Matrix& o) const {
  Matrix out = *this;
  for (size_t k = 0; k < a_.size(); ++k) out.a_[k] -= o.a_[k];
  return out;
}

std::vector<QPiScalar> Matrix::operator*(const std::vector<QPiScalar>& v) const {
  std::vector<QPiScalar> out(static_cast<size_t>(rows_));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) {
      const QPiScalar& x = (*this)(r, c);
      if (!x.is_zero() && !v[static_cast<size_t>(c)].is_zero()) out[static_cast<size_t>(r)] += x * v[static_cast<size_t>(c)];
    }
  return out;
}

Matrix Matrix::bar() const {
  Matrix out = *this;
  for (auto& x : out.a_) x = x.bar();
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

bool Matrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) {
      const QPiScalar& x = (*this)(r, c);
      if (r == c ? !x.is_one() : !x.is_zero()) return false;
    }
  return true;
}

RMatrix Matrix::component(int sign) const {
  RMatrix m(static_cast<size_t>(rows_), std::vector<RatFunc>(static_cast<size_t>(cols_)));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m[static_cast<size_t>(r)][static_cast<size_t>(c)] = (*this)(r, c).component(sign);
  return m;
}

Matrix Matrix::combine(const RMatrix& plus, const RMatrix& minus) {
  const int rows = static_cast<int>(plus.size());
  const int cols = rows ? static_cast<int>(plus[0].size()) : 0;
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = QPiScalar(plus[static_cast<size_t>(r)][static_cast<size_t>(c)], minus[static_cast<size_t>(r)][static_cast<size_t>(c)]);
  return m;
}

std::vector<int> rref(RMatrix& m) {
  std::vector<int> pivots;
  const size_t rows = m.size();
  if (rows == 0) return pivots;
  const size_t cols = m[0].size();
  size_t row = 0;
  for (size_t col = 0; col < cols && row < rows; ++col) {
    size_t piv = row;
    while (piv < rows && m[piv][col].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[row]);
    RatFunc inv = m[row][col].inverse();
    for (size_t k = col; k < cols; ++k)
      if (!m[row][k].is_zero()) m[row][k] *= inv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      RatFunc f = m[r][col];
      for (size_t k = col; k < cols; ++k)
        if (!m[row][k].is_zero()) m[r][k] -= f * m[row][k];
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  return pivots;
}

int rank_of(RMatrix m) { return static_cast<int>(rref(m).size()); }

std::vector<std::vector<RatFunc>> nullspace(RMatrix m) {
  const size_t cols = m.empty() ? 0 : m[0].size();
  std::vector<int> piv = rref(m);
  std::vector<bool> is_piv(cols, false);
  for (int p : piv) is_piv[static_cast<size_t>(p)] = true;
  std::vector<std::vector<RatFunc>> out;
  for (size_t f = 0; f < cols; ++f) {
    if (is_piv[f]) continue;
    std::vector<RatFunc> v(cols);
    v[f] = RatFunc(1);
    for (size_t r = 0; r < piv.size(); ++r) v[static_cast<size_t>(piv[r])] = -m[r][f];
    out.push_back(v);
  }
  return out;
}

RMatrix inverse(const RMatrix& m) {
  const size_t n = m.size();
  RMatrix aug(n, std::vector<RatFunc>(2 * n));
  for (size_t r = 0; r < n; ++r) {
    if (m[r].size() != n) throw DimensionMismatch("inverse of a non-square matrix");
    for (size_t c = 0; c < n; ++c) aug[r][c] = m[r][c];
    aug[r][n + r] = RatFunc(1);
  }
  std::vector<int> piv = rref(aug);
  if (piv.size() < n || (n > 0 && piv[n - 1] != static_cast<int>(n - 1))) throw NonInvertible("singular matrix");
  RMatrix out(n, std::vector<RatFunc>(n));
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) out[r][c] = aug[r][n + c];
  return out;
}

Matrix inverse(const Matrix& m) {
  return Matrix::combine(inverse(m.component(1)), inverse(m.component(-1)));
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          if (!b(k, l).is_zero()) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return out;
}

std::vector<QPiScalar> add(const std::vector<QPiScalar>& a, const std::vector<QPiScalar>& b) {
  std::vector<QPiScalar> out = a;
  for (size_t k = 0; k < b.size(); ++k) out[k] += b[k];
  return out;
}

std::vector<QPiScalar> scale(const QPiScalar& c, const std::vector<QPiScalar>& v) {
  std::vector<QPiScalar> out(v.size());
  for (size_t k = 0; k < v.size(); ++k)
    if (!v[k].is_zero()) out[k] = c * v[k];
  return out;
}

bool is_zero(const std::vector<QPiScalar>& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

}  // namespace qcov
