#include "qcov/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qcov {

// ---------------------------------------------------------------- LaurentPoly

LaurentPoly::LaurentPoly(const Integer& c) {
  if (c != 0) coeffs_.push_back(c);
}

LaurentPoly LaurentPoly::monomial(const Integer& c, int exponent) {
  LaurentPoly p(c);
  if (!p.is_zero()) p.low_ = exponent;
  return p;
}

LaurentPoly LaurentPoly::from_coeffs(std::vector<Integer> coeffs, int low) {
  LaurentPoly p;
  p.coeffs_ = std::move(coeffs);
  p.low_ = low;
  p.trim();
  return p;
}

void LaurentPoly::trim() {
  size_t end = coeffs_.size();
  while (end > 0 && coeffs_[end - 1] == 0) --end;
  coeffs_.resize(end);
  size_t start = 0;
  while (start < coeffs_.size() && coeffs_[start] == 0) ++start;
  if (start > 0) {
    coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(start));
    low_ += static_cast<int>(start);
  }
  if (coeffs_.empty()) low_ = 0;
}

Integer LaurentPoly::coeff(int exponent) const {
  int k = exponent - low_;
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0;
  return coeffs_[static_cast<size_t>(k)];
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  int lo = std::min(low_, o.low_);
  int hi = std::max(high(), o.high());
  if (lo < low_) {
    coeffs_.insert(coeffs_.begin(), static_cast<size_t>(low_ - lo), Integer(0));
    low_ = lo;
  }
  if (static_cast<int>(coeffs_.size()) < hi - lo + 1) coeffs_.resize(static_cast<size_t>(hi - lo + 1), Integer(0));
  for (size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[static_cast<size_t>(o.low_ - low_) + k] += o.coeffs_[k];
  trim();
  return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) { return *this += -o; }

LaurentPoly& LaurentPoly::operator*=(const Integer& c) {
  if (c == 0) {
    coeffs_.clear();
    low_ = 0;
    return *this;
  }
  for (auto& x : coeffs_) x *= c;
  return *this;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Integer> out(a.coeffs_.size() + b.coeffs_.size() - 1, Integer(0));
  for (size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (size_t j = 0; j < b.coeffs_.size(); ++j)
      mpz_addmul(out[i + j].get_mpz_t(), a.coeffs_[i].get_mpz_t(), b.coeffs_[j].get_mpz_t());
  }
  return LaurentPoly::from_coeffs(std::move(out), a.low_ + b.low_);
}

LaurentPoly LaurentPoly::shifted(int k) const {
  LaurentPoly r = *this;
  if (!r.is_zero()) r.low_ += k;
  return r;
}

LaurentPoly LaurentPoly::bar(int sign) const {
  if (is_zero()) return {};
  std::vector<Integer> out(coeffs_.rbegin(), coeffs_.rend());
  if (sign < 0) {
    // coefficient at exponent e picks up (-1)^e
    for (size_t k = 0; k < coeffs_.size(); ++k) {
      int e = low_ + static_cast<int>(k);
      if (e % 2 != 0) out[coeffs_.size() - 1 - k] = -out[coeffs_.size() - 1 - k];
    }
  }
  return from_coeffs(std::move(out), -high());
}

Integer LaurentPoly::content() const {
  Integer g = 0;
  for (const auto& c : coeffs_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

void LaurentPoly::divide_exact(const Integer& c) {
  if (c == 1) return;
  for (auto& x : coeffs_) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
}

namespace {

LaurentPoly primitive_positive(LaurentPoly p) {
  if (p.is_zero()) return p;
  p = p.shifted(-p.low());
  p.divide_exact(p.content());
  if (p.leading() < 0) p = -p;
  return p;
}

// Pseudo-remainder of a by b, both with low() == 0.
LaurentPoly pseudo_remainder(LaurentPoly a, const LaurentPoly& b) {
  const int n = b.high();
  const Integer& l = b.leading();
  while (!a.is_zero() && a.high() >= n) {
    Integer top = a.leading();
    int shift = a.high() - n;
    a *= l;
    LaurentPoly t = b.shifted(shift);
    t *= top;
    a -= t;
  }
  return a;
}

}  // namespace

LaurentPoly poly_gcd(LaurentPoly a, LaurentPoly b) {
  a = primitive_positive(std::move(a));
  b = primitive_positive(std::move(b));
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.high() < b.high()) std::swap(a, b);
  while (!b.is_zero()) {
    if (b.high() == 0) return LaurentPoly(Integer(1));
    LaurentPoly r = pseudo_remainder(a, b);
    a = std::move(b);
    b = primitive_positive(std::move(r));
  }
  return a;
}

LaurentPoly poly_divide_exact(const LaurentPoly& a, const LaurentPoly& b) {
  if (b.is_zero()) throw NonInvertible("polynomial division by zero");
  if (a.is_zero()) return {};
  std::vector<Integer> rem = a.coeffs();
  const auto& bc = b.coeffs();
  const size_t nb = bc.size();
  if (rem.size() < nb) throw ConsistencyFailure("inexact polynomial division");
  std::vector<Integer> quo(rem.size() - nb + 1, Integer(0));
  for (size_t k = quo.size(); k-- > 0;) {
    Integer& top = rem[k + nb - 1];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), bc.back().get_mpz_t()))
      throw ConsistencyFailure("inexact polynomial division");
    Integer c;
    mpz_divexact(c.get_mpz_t(), top.get_mpz_t(), bc.back().get_mpz_t());
    for (size_t j = 0; j < nb; ++j) mpz_submul(rem[k + j].get_mpz_t(), c.get_mpz_t(), bc[j].get_mpz_t());
    quo[k] = c;
  }
  for (const auto& r : rem)
    if (r != 0) throw ConsistencyFailure("inexact polynomial division");
  return LaurentPoly::from_coeffs(std::move(quo), a.low() - b.low());
}

// ---------------------------------------------------------------- RatFunc

RatFunc::RatFunc(long c) : RatFunc(Rational(c)) {}

RatFunc::RatFunc(const Rational& c) {
  if (c != 0) {
    scale_ = c;
    num_ = LaurentPoly(Integer(1));
  }
}

RatFunc::RatFunc(const LaurentPoly& p) : scale_(1), num_(p) { normalize(false); }

RatFunc::RatFunc(const Rational& scale, const LaurentPoly& num, const LaurentPoly& den)
    : scale_(scale), num_(num), den_(den) {
  if (den_.is_zero()) throw NonInvertible("rational function with zero denominator");
  if (scale_ == 0) num_ = {};
  normalize(true);
}

RatFunc RatFunc::q_power(int n) {
  RatFunc r;
  r.scale_ = 1;
  r.num_ = LaurentPoly::monomial(1, n);
  return r;
}

void RatFunc::normalize(bool reduce) {
  if (num_.is_zero() || scale_ == 0) {
    scale_ = 0;
    num_ = {};
    den_ = LaurentPoly(Integer(1));
    return;
  }
  Integer cn = num_.content();
  if (cn != 1) {
    num_.divide_exact(cn);
    scale_ *= cn;
  }
  Integer cd = den_.content();
  if (cd != 1) {
    den_.divide_exact(cd);
    scale_ /= cd;
  }
  if (num_.leading() < 0) {
    num_ = -num_;
    scale_ = -scale_;
  }
  if (den_.leading() < 0) {
    den_ = -den_;
    scale_ = -scale_;
  }
  int v = den_.low();
  if (v != 0) {
    den_ = den_.shifted(-v);
    num_ = num_.shifted(-v);
  }
  if (reduce && !den_.is_one()) {
    LaurentPoly g = poly_gcd(num_, den_);
    if (g.high() > 0) {
      num_ = poly_divide_exact(num_, g);
      den_ = poly_divide_exact(den_, g);
    }
  }
}

bool RatFunc::is_integral_laurent() const { return is_laurent() && scale_.get_den() == 1; }

std::optional<LaurentPoly> RatFunc::as_integral_laurent() const {
  if (is_zero()) return LaurentPoly();
  if (!is_integral_laurent()) return std::nullopt;
  LaurentPoly p = num_;
  p *= scale_.get_num();
  return p;
}

std::optional<Rational> RatFunc::as_constant() const {
  if (is_zero()) return Rational(0);
  if (!is_laurent() || num_.low() != 0 || num_.high() != 0) return std::nullopt;
  return scale_ * Rational(num_.coeffs()[0]);
}

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.scale_ = -r.scale_;
  return r;
}

RatFunc& RatFunc::operator+=(const RatFunc& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  Integer l;
  mpz_lcm(l.get_mpz_t(), scale_.get_den_mpz_t(), o.scale_.get_den_mpz_t());
  Integer alpha = scale_.get_num() * (l / scale_.get_den());
  Integer beta = o.scale_.get_num() * (l / o.scale_.get_den());
  if (den_ == o.den_) {
    LaurentPoly a = num_;
    a *= alpha;
    LaurentPoly b = o.num_;
    b *= beta;
    num_ = a + b;
    scale_ = Rational(1, 1) / Rational(l);
    normalize(!den_.is_one());
    return *this;
  }
  LaurentPoly g = poly_gcd(den_, o.den_);
  LaurentPoly d1g = poly_divide_exact(den_, g);
  LaurentPoly d2g = poly_divide_exact(o.den_, g);
  LaurentPoly a = num_ * d2g;
  a *= alpha;
  LaurentPoly b = o.num_ * d1g;
  b *= beta;
  num_ = a + b;
  den_ = den_ * d2g;
  scale_ = Rational(1, 1) / Rational(l);
  normalize(true);
  return *this;
}

RatFunc& RatFunc::operator-=(const RatFunc& o) { return *this += -o; }

RatFunc& RatFunc::operator*=(const RatFunc& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) return *this = RatFunc();
  scale_ *= o.scale_;
  if (den_.is_one() && o.den_.is_one()) {
    num_ = num_ * o.num_;
    return *this;
  }
  LaurentPoly n1 = num_, n2 = o.num_, d1 = den_, d2 = o.den_;
  if (!d2.is_one()) {
    LaurentPoly g = poly_gcd(n1, d2);
    if (g.high() > 0) {
      n1 = poly_divide_exact(n1, g);
      d2 = poly_divide_exact(d2, g);
    }
  }
  if (!d1.is_one()) {
    LaurentPoly g = poly_gcd(n2, d1);
    if (g.high() > 0) {
      n2 = poly_divide_exact(n2, g);
      d1 = poly_divide_exact(d1, g);
    }
  }
  num_ = n1 * n2;
  den_ = d1 * d2;
  normalize(false);
  return *this;
}

RatFunc RatFunc::inverse() const {
  if (is_zero()) throw NonInvertible("inverse of zero");
  RatFunc r;
  r.scale_ = 1 / scale_;
  r.num_ = den_;
  r.den_ = num_;
  r.normalize(false);
  return r;
}

RatFunc RatFunc::shifted(int k) const {
  RatFunc r = *this;
  r.num_ = r.num_.shifted(k);
  return r;
}

RatFunc RatFunc::scaled(const Rational& c) const {
  if (c == 0) return {};
  RatFunc r = *this;
  r.scale_ *= c;
  return r;
}

RatFunc RatFunc::bar(int sign) const {
  if (is_zero()) return {};
  RatFunc r;
  r.scale_ = scale_;
  r.num_ = num_.bar(sign);
  r.den_ = den_.bar(sign);
  r.normalize(false);
  return r;
}

// ---------------------------------------------------------------- QPiScalar

QPiScalar::QPiScalar(long c) : plus_(c), minus_(c) {}
QPiScalar::QPiScalar(const Rational& c) : plus_(c), minus_(c) {}

QPiScalar QPiScalar::from_ab(const RatFunc& a, const RatFunc& b) { return {a + b, a - b}; }

QPiScalar QPiScalar::monomial(const Rational& c, int qexp, int piexp) {
  RatFunc p = RatFunc::q_power(qexp).scaled(c);
  RatFunc m = (piexp % 2 != 0) ? -p : p;
  return {p, m};
}

RatFunc QPiScalar::a_part() const { return (plus_ + minus_).scaled(Rational(1, 2)); }
RatFunc QPiScalar::b_part() const { return (plus_ - minus_).scaled(Rational(1, 2)); }

bool QPiScalar::is_one() const {
  static const RatFunc one(1);
  return plus_ == one && minus_ == one;
}

bool QPiScalar::in_integral_form() const {
  return a_part().is_integral_laurent() && b_part().is_integral_laurent();
}

QPiScalar& QPiScalar::operator+=(const QPiScalar& o) {
  plus_ += o.plus_;
  minus_ += o.minus_;
  return *this;
}

QPiScalar& QPiScalar::operator-=(const QPiScalar& o) {
  plus_ -= o.plus_;
  minus_ -= o.minus_;
  return *this;
}

QPiScalar& QPiScalar::operator*=(const QPiScalar& o) {
  plus_ *= o.plus_;
  minus_ *= o.minus_;
  return *this;
}

QPiScalar QPiScalar::shifted(int qexp, int piexp) const {
  RatFunc m = minus_.shifted(qexp);
  if (piexp % 2 != 0) m = -m;
  return {plus_.shifted(qexp), std::move(m)};
}

QPiScalar QPiScalar::inverse() const {
  if (plus_.is_zero() || minus_.is_zero())
    throw NonInvertible("scalar is zero or a zero divisor: " + to_string(*this));
  return {plus_.inverse(), minus_.inverse()};
}

// ---------------------------------------------------------------- q-integers

QPiScalar qpi_integer(int n, int d) {
  if (n == 0) return {};
  if (n < 0) return -(qpi_integer(-n, d).shifted(0, d * n));
  // sum_{k=0}^{n-1} (pi q)^{n-1-k} q^{-k}, then q -> q^d, pi -> pi^d
  std::vector<Integer> plus(static_cast<size_t>(2 * (n - 1) * d + 1), Integer(0));
  std::vector<Integer> minus = plus;
  for (int k = 0; k < n; ++k) {
    int e = (n - 1 - 2 * k) * d + (n - 1) * d;
    plus[static_cast<size_t>(e)] += 1;
    minus[static_cast<size_t>(e)] += (((n - 1 - k) * d) % 2 == 0) ? 1 : -1;
  }
  int low = -(n - 1) * d;
  return {RatFunc(LaurentPoly::from_coeffs(plus, low)), RatFunc(LaurentPoly::from_coeffs(minus, low))};
}

QPiScalar qpi_factorial(int n, int d) {
  if (n < 0) throw NegativeWeight("factorial of a negative integer");
  QPiScalar r(1);
  for (int k = 2; k <= n; ++k) r *= qpi_integer(k, d);
  return r;
}

QPiScalar qpi_odd_double_factorial(int k, int d) {
  if (k < 0) throw NegativeWeight("double factorial of a negative integer");
  QPiScalar r(1);
  for (int j = 1; j <= k; ++j) r *= qpi_integer(2 * j - 1, d);
  return r;
}

QPiScalar qpi_even_double_factorial(int k, int d) {
  if (k < 0) throw NegativeWeight("double factorial of a negative integer");
  QPiScalar r(1);
  for (int j = 1; j <= k; ++j) r *= qpi_integer(2 * j, d);
  return r;
}

QPiScalar qpi_binomial(int m, int n, int d) {
  if (m < 0 || n < 0) throw std::domain_error("binomial with negative argument");
  if (n > m) return {};
  QPiScalar num(1), den(1);
  for (int k = 0; k < n; ++k) {
    num *= qpi_integer(m - k, d);
    den *= qpi_integer(k + 1, d);
  }
  return num * den.inverse();
}

QPiScalar qpi_bracket_denominator(int d, int p) {
  return QPiScalar::monomial(1, d, p) - QPiScalar::monomial(1, -d, 0);
}

// ---------------------------------------------------------------- rendering

namespace {

struct Style {
  std::string pi;
  bool tex;
};

std::string rational_str(const Rational& r, const Style& st) {
  if (st.tex && r.get_den() != 1) {
    std::string s = r < 0 ? "-" : "";
    Rational a = abs(r);
    return s + "\\frac{" + a.get_num().get_str() + "}{" + a.get_den().get_str() + "}";
  }
  return r.get_str();
}

std::string q_power_str(int e, const Style& st) {
  if (e == 0) return "";
  if (e == 1) return "q";
  if (st.tex) return "q^{" + std::to_string(e) + "}";
  return "q^" + std::to_string(e);
}

// c * base, where base may be empty (meaning 1)
std::string scaled_term(const Rational& c, const std::string& base, const Style& st) {
  const std::string mul = st.tex ? " " : "*";
  if (base.empty()) return rational_str(c, st);
  if (c == 1) return base;
  if (c == -1) return "-" + base;
  return rational_str(c, st) + mul + base;
}

std::string join_terms(const std::vector<std::string>& terms) {
  if (terms.empty()) return "0";
  std::string out = terms[0];
  for (size_t k = 1; k < terms.size(); ++k) {
    if (!terms[k].empty() && terms[k][0] == '-')
      out += " - " + terms[k].substr(1);
    else
      out += " + " + terms[k];
  }
  return out;
}

// Laurent part with rational coefficients a + pi*b, descending in q.
std::string render_laurent_pair(const RatFunc& a, const RatFunc& b, const Style& st) {
  int hi = -1000000, lo = 1000000;
  for (const RatFunc* f : {&a, &b}) {
    if (f->is_zero()) continue;
    hi = std::max(hi, f->num().high());
    lo = std::min(lo, f->num().low());
  }
  const std::string mul = st.tex ? " " : "*";
  std::vector<std::string> terms;
  for (int e = hi; e >= lo; --e) {
    Rational ca = a.is_zero() ? Rational(0) : a.scale() * Rational(a.num().coeff(e));
    Rational cb = b.is_zero() ? Rational(0) : b.scale() * Rational(b.num().coeff(e));
    if (ca == 0 && cb == 0) continue;
    std::string qp = q_power_str(e, st);
    if (cb == 0) {
      terms.push_back(scaled_term(ca, qp, st));
    } else if (ca == 0) {
      terms.push_back(scaled_term(cb, qp.empty() ? st.pi : st.pi + mul + qp, st));
    } else {
      std::string inner = join_terms({rational_str(ca, st), scaled_term(cb, st.pi, st)});
      terms.push_back(qp.empty() ? "(" + inner + ")" : "(" + inner + ")" + mul + qp);
    }
  }
  return join_terms(terms);
}

std::string render_ratfunc(const RatFunc& f, const Style& st) {
  if (f.is_laurent()) return render_laurent_pair(f, RatFunc(), st);
  std::string n = render_laurent_pair(RatFunc(f.num()), RatFunc(), st);
  std::string d = render_laurent_pair(RatFunc(f.den()), RatFunc(), st);
  std::string frac = st.tex ? "\\frac{" + n + "}{" + d + "}" : "(" + n + ")/(" + d + ")";
  if (f.scale() == 1) return frac;
  return scaled_term(f.scale(), frac, st);
}

std::string render_scalar(const QPiScalar& s, const Style& st) {
  RatFunc a = s.a_part(), b = s.b_part();
  if (a.is_laurent() && b.is_laurent()) return render_laurent_pair(a, b, st);
  const std::string mul = st.tex ? " " : "*";
  std::vector<std::string> terms;
  if (!a.is_zero()) terms.push_back(render_ratfunc(a, st));
  if (!b.is_zero()) terms.push_back(st.pi + mul + "(" + render_ratfunc(b, st) + ")");
  return join_terms(terms);
}

}  // namespace

std::string to_string(const LaurentPoly& p, const std::string& var) {
  std::string s = render_laurent_pair(RatFunc(p), RatFunc(), Style{"p", false});
  if (var != "q") std::replace(s.begin(), s.end(), 'q', var[0]);
  return s;
}

std::string to_string(const RatFunc& f) { return render_ratfunc(f, Style{"p", false}); }
std::string to_string(const QPiScalar& s) { return render_scalar(s, Style{"p", false}); }
std::string to_tex(const QPiScalar& s) { return render_scalar(s, Style{"\\pi", true}); }

std::ostream& operator<<(std::ostream& os, const QPiScalar& s) { return os << to_string(s); }
std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << to_string(f); }

// ---------------------------------------------------------------- parsing

namespace {

class ScalarParser {
 public:
  explicit ScalarParser(const std::string& text) : s_(text) {}

  QPiScalar parse() {
    QPiScalar v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  QPiScalar expr() {
    QPiScalar v = term();
    for (;;) {
      if (accept('+'))
        v += term();
      else if (accept('-'))
        v -= term();
      else
        return v;
    }
  }
  QPiScalar term() {
    QPiScalar v = unary();
    for (;;) {
      if (accept('*'))
        v *= unary();
      else if (accept('/'))
        v *= unary().inverse();
      else
        return v;
    }
  }
  QPiScalar unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  int signed_int() {
    skip();
    bool neg = accept('-');
    if (!neg) accept('+');
    if (accept('(')) {
      int v = signed_int();
      if (!accept(')')) fail("expected ')'");
      return neg ? -v : v;
    }
    skip();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int v = std::stoi(s_.substr(start, pos_ - start));
    return neg ? -v : v;
  }
  QPiScalar power() {
    QPiScalar base = atom();
    if (accept('^')) {
      int e = signed_int();
      QPiScalar b = e < 0 ? base.inverse() : base;
      QPiScalar r(1);
      for (int k = 0; k < std::abs(e); ++k) r *= b;
      return r;
    }
    return base;
  }
  QPiScalar atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      QPiScalar v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return QPiScalar(Rational(Integer(s_.substr(start, pos_ - start))));
    }
    if (c == 'q') {
      ++pos_;
      return QPiScalar::q();
    }
    if (c == 'p') {
      ++pos_;
      if (pos_ < s_.size() && s_[pos_] == 'i') ++pos_;
      return QPiScalar::pi();
    }
    fail("unexpected character");
  }

  std::string s_;
  size_t pos_ = 0;
};

}  // namespace

QPiScalar parse_scalar(const std::string& text) { return ScalarParser(text).parse(); }

}  // namespace qcov
