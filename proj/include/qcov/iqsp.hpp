#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcov/quasi.hpp"

namespace qcov {

// B_i = F_i + varsigma_i E_{tau i} K~_i^{-1} in PBW normal form.
inline PbwElement embed_b(CoveringAlgebra& u, const IParams& p, int i) { return b_generator(u, p, i); }

// A letter of the generator alphabet of U^i.
struct IGen {
  enum Kind { B, Jt, K, J } kind = B;
  int i = 0;       // for B and Jt
  YCoweight mu;    // for K and J
  auto operator<=>(const IGen&) const = default;
};

// Noncommutative polynomial in the generators of U^i.
struct IExpr {
  std::map<std::vector<IGen>, QPiScalar> terms;

  static IExpr scalar(const QPiScalar& c);
  static IExpr gen(const IGen& g);
  static IExpr b(int i) { return gen({IGen::B, i, {}}); }
  static IExpr jt(int i) { return gen({IGen::Jt, i, {}}); }
  static IExpr k(const YCoweight& mu) { return gen({IGen::K, 0, mu}); }

  bool is_zero() const { return terms.empty(); }
  void add(const std::vector<IGen>& w, const QPiScalar& c);
  IExpr operator+(const IExpr& o) const;
  IExpr operator-(const IExpr& o) const;
  IExpr operator*(const IExpr& o) const;
  IExpr scaled(const QPiScalar& c) const;
  bool operator==(const IExpr& o) const { return terms == o.terms; }
};

// psi_i: bars coefficients, fixes B_i and J~_i, sends K_mu to J_mu K_{-mu}.
IExpr psi_i(const IExpr& x);
// Only presentations can be barred; a bare PBW element is rejected.
[[noreturn]] void psi_i(const PbwElement& x);

PbwElement evaluate(CoveringAlgebra& u, const IParams& p, const IExpr& x);
std::string render(const Datum& d, const IExpr& x);

// Polynomial in one variable B with coefficients in Q(q)^pi[J~]/(J~^2 - 1).
// Valid as a description of U^i elements when J~_i commutes with B_i (tau i = i).
struct BPoly {
  std::map<std::pair<int, int>, QPiScalar> coeff;  // (power of B, power of J~) -> coefficient

  static BPoly constant(const QPiScalar& c, int jpow = 0);
  static BPoly var();
  int degree() const;
  // Coefficient of B^n as (J~^0 part, J~^1 part).
  std::pair<QPiScalar, QPiScalar> at(int n) const;
  BPoly operator+(const BPoly& o) const;
  BPoly operator-(const BPoly& o) const;
  BPoly operator*(const BPoly& o) const;
  BPoly scaled(const QPiScalar& c) const;
  BPoly bar() const;
  bool operator==(const BPoly& o) const { return coeff == o.coeff; }

  IExpr to_expr(int i) const;
  std::string render() const;
};

enum class IParity { Even = 0, Odd = 1 };

struct IDividedPower {
  int i = 0;
  int m = 0;
  IParity parity = IParity::Even;
  BPoly poly;
  std::string symbolic;  // product form, e.g. "(B^2 - s*p*q*[1]^2*J)/[2]!"
  PbwElement value;
};

// B^{(m)}_{i,parity}; for tau i != i the plain B_i^m / [m]_i! (parity ignored).
IDividedPower idivided_power(CoveringAlgebra& u, const IParams& p, int i, int m, IParity parity);
// Abstract polynomial only; no PBW expansion.
BPoly idivided_poly(const Datum& d, const IParams& p, int i, int m, IParity parity);
std::string idivided_symbolic(const IParams& p, int i, int m, IParity parity);

// Parity tag attached to lambda for the index i: <i, lambda> mod 2.
IParity parity_tag(const Datum& d, int i, const XWeight& lambda);

// x 1_lambda: every J_a K_b sitting between F_x and E_y is replaced by its
// scalar on weight lambda + |y|, leaving keys with trivial Cartan part.
PbwElement at_weight(CoveringAlgebra& u, const PbwElement& x, const XWeight& lambda);

}  // namespace qcov
