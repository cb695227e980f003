#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qcov/free_half.hpp"

namespace qcov {

// One PBW monomial F_x J^a K^b E_y, with x and y pivot words of f.
struct PbwKey {
  RootWeight fwt;
  int fidx = 0;
  std::vector<int> j;  // Y coordinates mod 2
  std::vector<int> k;  // Y coordinates
  RootWeight ewt;
  int eidx = 0;

  auto operator<=>(const PbwKey&) const = default;
};

struct PbwElement {
  std::map<PbwKey, QPiScalar> terms;

  bool is_zero() const { return terms.empty(); }
  void add(const PbwKey& k, const QPiScalar& c);
  PbwElement& operator+=(const PbwElement& o);
  PbwElement operator+(const PbwElement& o) const;
  PbwElement operator-(const PbwElement& o) const;
  PbwElement scaled(const QPiScalar& c) const;
  bool operator==(const PbwElement& o) const { return terms == o.terms; }
};

using TensorKey = std::pair<PbwKey, PbwKey>;

struct TensorElement {
  std::map<TensorKey, QPiScalar> terms;

  bool is_zero() const { return terms.empty(); }
  void add(const TensorKey& k, const QPiScalar& c);
  TensorElement& operator+=(const TensorElement& o);
  TensorElement operator-(const TensorElement& o) const;
  TensorElement scaled(const QPiScalar& c) const;
  bool operator==(const TensorElement& o) const { return terms == o.terms; }
};

// The covering group U with products computed in PBW normal form F J K E.
// Not thread-safe (shares the caches of its half-algebra).
class CoveringAlgebra {
 public:
  CoveringAlgebra(std::shared_ptr<HalfAlgebra> half, int height_bound);

  HalfAlgebra& half() { return *half_; }
  const Datum& datum() const { return half_->datum(); }
  int height_bound() const { return bound_; }

  PbwKey unit_key() const;
  PbwElement one() const;
  PbwElement E(int i) const;
  PbwElement F(int i) const;
  PbwElement K(const YCoweight& mu) const;
  PbwElement J(const YCoweight& mu) const;
  // K~_i^n and J~_i
  PbwElement Kt(int i, int n = 1) const;
  PbwElement Jt(int i) const;
  PbwElement plus(const HalfVec& v) const;   // v^+ in U^+
  PbwElement minus(const HalfVec& v) const;  // v^- in U^-

  int parity(const PbwKey& k) const;
  int e_height(const PbwKey& k) const { return k.ewt.height(); }
  int f_height(const PbwKey& k) const { return k.fwt.height(); }

  // Left multiplication by a generator. With drop set, terms whose E/F height
  // would exceed the bound are discarded; otherwise TruncationOverflow is thrown.
  PbwElement lmul_E(int i, const PbwElement& x, bool drop = false);
  PbwElement lmul_F(int i, const PbwElement& x, bool drop = false);
  PbwElement lmul_K(const YCoweight& mu, const PbwElement& x) const;
  PbwElement lmul_J(const YCoweight& mu, const PbwElement& x) const;

  PbwElement mul(const PbwElement& x, const PbwElement& y, bool drop = false);
  PbwElement bar_psi(const PbwElement& x) const;

  // Coproduct of a normal-form element; terms whose E/F heights exceed `bound`
  // on either leg are dropped.
  TensorElement coproduct(const PbwElement& x, int bound);
  TensorElement tensor(const PbwElement& a, const PbwElement& b) const;
  TensorElement tensor_mul(const TensorElement& a, const TensorElement& b, bool drop = false);
  TensorElement tensor_bar(const TensorElement& x) const;
  // Projection onto terms satisfying a predicate.
  template <class Pred>
  static TensorElement filter(const TensorElement& x, Pred pred) {
    TensorElement r;
    for (const auto& [k, c] : x.terms)
      if (pred(k)) r.terms.emplace(k, c);
    return r;
  }

  std::string render_key(const PbwKey& k) const;
  std::string render(const PbwElement& x) const;
  std::string render(const TensorElement& x) const;

 private:
  bool fits(const RootWeight& nu) const { return nu.height() <= bound_; }
  void overflow(const RootWeight& nu) const;
  const Word& fword(const PbwKey& k);
  const Word& eword(const PbwKey& k);
  PbwElement mul_key(const PbwKey& k, const PbwElement& y, bool drop);

  std::shared_ptr<HalfAlgebra> half_;
  int bound_;
  std::map<std::pair<RootWeight, int>, TensorElement> delta_f_, delta_e_;
};

}  // namespace qcov
