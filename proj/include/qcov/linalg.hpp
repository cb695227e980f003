#pragma once

#include <vector>

#include "qcov/scalar.hpp"

namespace qcov {

// Dense matrix over Q(q), used for per-component elimination.
using RMatrix = std::vector<std::vector<RatFunc>>;

// Dense matrix over Q(q)^pi.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows * cols)) {}
  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  QPiScalar& operator()(int r, int c) { return a_[static_cast<size_t>(r * cols_ + c)]; }
  const QPiScalar& operator()(int r, int c) const { return a_[static_cast<size_t>(r * cols_ + c)]; }
  std::vector<QPiScalar> column(int c) const;
  void set_column(int c, const std::vector<QPiScalar>& v);

  Matrix operator*(const Matrix& o) const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  std::vector<QPiScalar> operator*(const std::vector<QPiScalar>& v) const;
  bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
  Matrix bar() const;
  Matrix transpose() const;
  bool is_zero() const;
  bool is_identity() const;

  RMatrix component(int sign) const;
  static Matrix combine(const RMatrix& plus, const RMatrix& minus);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<QPiScalar> a_;
};

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RMatrix& m);
int rank_of(RMatrix m);
// Basis of { x : m x = 0 }, one vector per free column, in column order.
std::vector<std::vector<RatFunc>> nullspace(RMatrix m);
RMatrix inverse(const RMatrix& m);
// Componentwise inverse; NonInvertible if singular in either component.
Matrix inverse(const Matrix& m);
// Kronecker product (a (x) b) with index (i, j) -> i * b.rows + j.
Matrix kronecker(const Matrix& a, const Matrix& b);

std::vector<QPiScalar> add(const std::vector<QPiScalar>& a, const std::vector<QPiScalar>& b);
std::vector<QPiScalar> scale(const QPiScalar& c, const std::vector<QPiScalar>& v);
bool is_zero(const std::vector<QPiScalar>& v);

}  // namespace qcov
