#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qcov/datum.hpp"
#include "qcov/linalg.hpp"

namespace qcov {

// Letters are 0-based positions in I.
using Word = std::vector<int>;

std::string render_word(const Datum& d, const Word& w);

// Element of the free algebra 'f: a finite combination of words.
struct FreeElement {
  std::map<Word, QPiScalar> terms;

  static FreeElement word(const Word& w, const QPiScalar& c = QPiScalar(1));
  bool is_zero() const { return terms.empty(); }
  void add(const Word& w, const QPiScalar& c);
  FreeElement& operator+=(const FreeElement& o);
  FreeElement operator+(const FreeElement& o) const;
  FreeElement operator-(const FreeElement& o) const;
  FreeElement scaled(const QPiScalar& c) const;
  bool operator==(const FreeElement& o) const { return terms == o.terms; }
};

FreeElement mul_free(const FreeElement& x, const FreeElement& y);

// Basis data for one weight space of f.
struct QuotientBasis {
  RootWeight nu;
  std::vector<Word> words;           // all words of weight nu, lexicographic
  std::vector<int> pivots;           // indices into words
  std::vector<Word> pivot_words;
  Matrix gram_words;                 // normalized Gram matrix of all words
  Matrix gram;                       // true form on pivots
  Matrix gram_inv;                   // inverse of `gram`
  Matrix gram_normalized_inv;        // inverse of the normalized pivot Gram
  QPiScalar normalizer;              // prod (1 - pi_i q_i^{-2})^{nu_i}
  std::vector<std::vector<QPiScalar>> radical;  // vectors over `words`
  int dim() const { return static_cast<int>(pivots.size()); }
};

// Element of f_nu in pivot coordinates.
struct HalfVec {
  RootWeight nu;
  std::vector<QPiScalar> c;

  bool is_zero() const { return qcov::is_zero(c); }
  bool operator==(const HalfVec& o) const { return nu == o.nu && c == o.c; }
};

// The half-algebra f of a datum with cached weight-space data.
// Instances are not thread-safe; use one per worker.
class HalfAlgebra {
 public:
  HalfAlgebra(std::shared_ptr<const Datum> datum, int height_bound);

  const Datum& datum() const { return *datum_; }
  std::shared_ptr<const Datum> datum_ptr() const { return datum_; }
  int height_bound() const { return height_bound_; }

  RootWeight weight(const Word& w) const;
  int parity(const Word& w) const;
  // Weights nu in N[I] with ht(nu) == h / <= n, in lexicographic order.
  std::vector<RootWeight> weights_of_height(int h) const;
  std::vector<RootWeight> weights_upto(int n) const;
  std::vector<Word> words_of_weight(const RootWeight& nu) const;

  // Twisted derivations on the free algebra.
  FreeElement ir(int i, const FreeElement& x) const;
  FreeElement ri(int i, const FreeElement& x) const;
  FreeElement ir(int i, const Word& w) const;
  FreeElement ri(int i, const Word& w) const;

  // (theta_i, theta_i) = 1 / (1 - pi_i q_i^{-2})
  QPiScalar theta_norm(int i) const;
  QPiScalar form(const FreeElement& x, const FreeElement& y);
  // Normalized form on words: form * prod (1 - pi_i q_i^{-2})^{nu_i}.
  QPiScalar form_normalized(const Word& x, const Word& y);

  FreeElement serre_element(int i, int j) const;
  FreeElement divided_power(int i, int m) const;

  const QuotientBasis& basis(const RootWeight& nu);
  int dim(const RootWeight& nu) { return basis(nu).dim(); }

  std::vector<QPiScalar> word_coords(const Word& w);
  HalfVec reduce(const FreeElement& x);
  HalfVec reduce(const FreeElement& x, const RootWeight& nu);
  FreeElement lift(const HalfVec& v);
  HalfVec zero(const RootWeight& nu);
  HalfVec unit(const RootWeight& nu, int k);
  HalfVec one();

  HalfVec left_mul(int i, const HalfVec& v);
  HalfVec right_mul(const HalfVec& v, int i);
  HalfVec multiply(const HalfVec& a, const HalfVec& b);
  HalfVec ir(int i, const HalfVec& v);
  HalfVec ri(int i, const HalfVec& v);
  HalfVec bar(const HalfVec& v) const;
  QPiScalar form(const HalfVec& a, const HalfVec& b);

  // Dual basis vector b*_l in pivot coordinates: sum_m (G^{-1})_{ml} p_m.
  HalfVec dual(const RootWeight& nu, int l);

 private:
  const Matrix& word_gram(const RootWeight& nu);
  void check_height(const RootWeight& nu) const;

  std::shared_ptr<const Datum> datum_;
  int height_bound_;
  std::map<RootWeight, Matrix> word_gram_;
  std::map<RootWeight, std::map<Word, int>> word_index_;
  std::map<RootWeight, QuotientBasis> bases_;
  std::map<Word, std::vector<QPiScalar>> coords_;
  std::map<std::pair<int, RootWeight>, Matrix> left_mul_, ir_, ri_;
};

}  // namespace qcov
