#pragma once

#include <gmpxx.h>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qcov/error.hpp"

namespace qcov {

using Integer = mpz_class;
using Rational = mpq_class;

// Laurent polynomial in q with integer coefficients.
// Invariant: zero is the empty vector; otherwise first and last coefficients are nonzero.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  explicit LaurentPoly(const Integer& c);
  static LaurentPoly monomial(const Integer& c, int exponent);
  static LaurentPoly from_coeffs(std::vector<Integer> coeffs, int low);

  bool is_zero() const { return coeffs_.empty(); }
  bool is_one() const { return coeffs_.size() == 1 && low_ == 0 && coeffs_[0] == 1; }
  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Integer>& coeffs() const { return coeffs_; }
  Integer coeff(int exponent) const;
  const Integer& leading() const { return coeffs_.back(); }

  LaurentPoly operator-() const;
  LaurentPoly& operator+=(const LaurentPoly& o);
  LaurentPoly& operator-=(const LaurentPoly& o);
  LaurentPoly& operator*=(const Integer& c);
  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.low_ == b.low_ && a.coeffs_ == b.coeffs_;
  }

  LaurentPoly shifted(int k) const;
  // f(q) -> f(sign * q^{-1})
  LaurentPoly bar(int sign) const;
  // Positive gcd of the coefficients (0 for the zero polynomial).
  Integer content() const;
  void divide_exact(const Integer& c);

 private:
  void trim();
  std::vector<Integer> coeffs_;
  int low_ = 0;
};

// Helpers treating polynomials with low() == 0 as ordinary polynomials.
LaurentPoly poly_gcd(LaurentPoly a, LaurentPoly b);
LaurentPoly poly_divide_exact(const LaurentPoly& a, const LaurentPoly& b);

// Element of Q(q) in canonical form: scale * num / den with num, den primitive,
// both leading coefficients positive and den of valuation 0.
class RatFunc {
 public:
  RatFunc() = default;
  RatFunc(long c);  // NOLINT(google-explicit-constructor)
  explicit RatFunc(const Rational& c);
  explicit RatFunc(const LaurentPoly& p);
  RatFunc(const Rational& scale, const LaurentPoly& num, const LaurentPoly& den);
  static RatFunc q_power(int n);

  bool is_zero() const { return num_.is_zero(); }
  bool is_laurent() const { return den_.is_one(); }
  bool is_integral_laurent() const;
  std::optional<LaurentPoly> as_integral_laurent() const;
  std::optional<Rational> as_constant() const;
  const Rational& scale() const { return scale_; }
  const LaurentPoly& num() const { return num_; }
  const LaurentPoly& den() const { return den_; }

  RatFunc operator-() const;
  RatFunc& operator+=(const RatFunc& o);
  RatFunc& operator-=(const RatFunc& o);
  RatFunc& operator*=(const RatFunc& o);
  friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
  friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
  friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.scale_ == b.scale_ && a.num_ == b.num_ && a.den_ == b.den_;
  }

  RatFunc inverse() const;
  RatFunc shifted(int k) const;
  RatFunc scaled(const Rational& c) const;
  RatFunc bar(int sign) const;

 private:
  void normalize(bool reduce);
  Rational scale_{0};
  LaurentPoly num_;
  LaurentPoly den_{Integer(1)};
};

// Element of Q(q)^pi, stored as its images under pi -> +1 and pi -> -1.
class QPiScalar {
 public:
  QPiScalar() = default;
  QPiScalar(long c);  // NOLINT(google-explicit-constructor)
  explicit QPiScalar(const Rational& c);
  QPiScalar(RatFunc plus, RatFunc minus) : plus_(std::move(plus)), minus_(std::move(minus)) {}
  // a + pi*b
  static QPiScalar from_ab(const RatFunc& a, const RatFunc& b);
  static QPiScalar q() { return monomial(1, 1, 0); }
  static QPiScalar pi() { return monomial(1, 0, 1); }
  // c * q^qexp * pi^piexp
  static QPiScalar monomial(const Rational& c, int qexp, int piexp);

  const RatFunc& plus() const { return plus_; }
  const RatFunc& minus() const { return minus_; }
  const RatFunc& component(int sign) const { return sign > 0 ? plus_ : minus_; }
  RatFunc a_part() const;
  RatFunc b_part() const;

  bool is_zero() const { return plus_.is_zero() && minus_.is_zero(); }
  bool is_one() const;
  bool in_integral_form() const;

  QPiScalar operator-() const { return {-plus_, -minus_}; }
  QPiScalar& operator+=(const QPiScalar& o);
  QPiScalar& operator-=(const QPiScalar& o);
  QPiScalar& operator*=(const QPiScalar& o);
  friend QPiScalar operator+(QPiScalar a, const QPiScalar& b) { return a += b; }
  friend QPiScalar operator-(QPiScalar a, const QPiScalar& b) { return a -= b; }
  friend QPiScalar operator*(QPiScalar a, const QPiScalar& b) { return a *= b; }
  friend bool operator==(const QPiScalar& a, const QPiScalar& b) {
    return a.plus_ == b.plus_ && a.minus_ == b.minus_;
  }

  // Multiply by q^qexp * pi^piexp without general arithmetic.
  QPiScalar shifted(int qexp, int piexp) const;
  QPiScalar scaled(const Rational& c) const { return {plus_.scaled(c), minus_.scaled(c)}; }
  QPiScalar inverse() const;
  QPiScalar bar() const { return {plus_.bar(1), minus_.bar(-1)}; }
  RatFunc specialize(int sign) const { return component(sign); }

 private:
  RatFunc plus_;
  RatFunc minus_;
};

// [n] with q -> q^d, pi -> pi^d.
QPiScalar qpi_integer(int n, int d = 1);
QPiScalar qpi_factorial(int n, int d = 1);
// [2k-1]!! = [1][3]...[2k-1]
QPiScalar qpi_odd_double_factorial(int k, int d = 1);
// [2k]!! = [2][4]...[2k]
QPiScalar qpi_even_double_factorial(int k, int d = 1);
QPiScalar qpi_binomial(int m, int n, int d = 1);
// pi_i q_i - q_i^{-1} for an index with q_i = q^d, pi_i = pi^p.
QPiScalar qpi_bracket_denominator(int d, int p);

std::string to_string(const LaurentPoly& p, const std::string& var = "q");
std::string to_string(const RatFunc& f);
std::string to_string(const QPiScalar& s);
std::string to_tex(const QPiScalar& s);
std::ostream& operator<<(std::ostream& os, const QPiScalar& s);
std::ostream& operator<<(std::ostream& os, const RatFunc& f);

// Parses expressions over integers, q, p (for pi), + - * / ^ and parentheses.
QPiScalar parse_scalar(const std::string& text);

}  // namespace qcov
