#include "qcov/free_half.hpp"

#include <algorithm>

namespace qcov {

std::string render_word(const Datum& d, const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (size_t k = 0; k < w.size(); ++k) s += (k ? "." : "") + std::string("t") + d.label(w[k]);
  return s;
}

// ---------------------------------------------------------------- FreeElement

FreeElement FreeElement::word(const Word& w, const QPiScalar& c) {
  FreeElement e;
  e.add(w, c);
  return e;
}

void FreeElement::add(const Word& w, const QPiScalar& c) {
  if (c.is_zero()) return;
  auto it = terms.find(w);
  if (it == terms.end()) {
    terms.emplace(w, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

FreeElement& FreeElement::operator+=(const FreeElement& o) {
  for (const auto& [w, c] : o.terms) add(w, c);
  return *this;
}

FreeElement FreeElement::operator+(const FreeElement& o) const {
  FreeElement r = *this;
  return r += o;
}

FreeElement FreeElement::operator-(const FreeElement& o) const {
  FreeElement r = *this;
  for (const auto& [w, c] : o.terms) r.add(w, -c);
  return r;
}

FreeElement FreeElement::scaled(const QPiScalar& c) const {
  FreeElement r;
  for (const auto& [w, x] : terms) r.add(w, c * x);
  return r;
}

FreeElement mul_free(const FreeElement& x, const FreeElement& y) {
  FreeElement r;
  for (const auto& [a, ca] : x.terms)
    for (const auto& [b, cb] : y.terms) {
      Word w = a;
      w.insert(w.end(), b.begin(), b.end());
      r.add(w, ca * cb);
    }
  return r;
}

// ---------------------------------------------------------------- HalfAlgebra

HalfAlgebra::HalfAlgebra(std::shared_ptr<const Datum> datum, int height_bound)
    : datum_(std::move(datum)), height_bound_(height_bound) {}

RootWeight HalfAlgebra::weight(const Word& w) const {
  RootWeight nu = RootWeight::zero(datum_->rank());
  for (int i : w) ++nu.c[static_cast<size_t>(i)];
  return nu;
}

int HalfAlgebra::parity(const Word& w) const {
  int s = 0;
  for (int i : w) s += datum_->p(i);
  return s % 2;
}

std::vector<RootWeight> HalfAlgebra::weights_of_height(int h) const {
  std::vector<RootWeight> out;
  const int n = datum_->rank();
  RootWeight cur = RootWeight::zero(n);
  // enumerate compositions of h into n parts, lexicographically
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      cur.c[static_cast<size_t>(pos)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur.c[static_cast<size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  if (h >= 0) rec(rec, 0, h);
  return out;
}

std::vector<RootWeight> HalfAlgebra::weights_upto(int n) const {
  std::vector<RootWeight> out;
  for (int h = 0; h <= n; ++h) {
    auto w = weights_of_height(h);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

std::vector<Word> HalfAlgebra::words_of_weight(const RootWeight& nu) const {
  if (!nu.nonnegative()) return {};
  if (nu.is_zero()) return {Word{}};
  std::vector<Word> out;
  for (int i = 0; i < datum_->rank(); ++i) {
    if (nu[i] == 0) continue;
    for (auto& w : words_of_weight(nu - RootWeight::simple(datum_->rank(), i))) {
      Word x{i};
      x.insert(x.end(), w.begin(), w.end());
      out.push_back(std::move(x));
    }
  }
  return out;
}

FreeElement HalfAlgebra::ir(int i, const Word& w) const {
  FreeElement r;
  RootWeight prefix = RootWeight::zero(datum_->rank());
  int prefix_parity = 0;
  for (size_t a = 0; a < w.size(); ++a) {
    if (w[a] == i) {
      Word x = w;
      x.erase(x.begin() + static_cast<long>(a));
      r.add(x, QPiScalar::monomial(1, datum_->dot(prefix, i), prefix_parity * datum_->p(i)));
    }
    ++prefix.c[static_cast<size_t>(w[a])];
    prefix_parity += datum_->p(w[a]);
  }
  return r;
}

FreeElement HalfAlgebra::ri(int i, const Word& w) const {
  FreeElement r;
  RootWeight suffix = RootWeight::zero(datum_->rank());
  int suffix_parity = 0;
  for (size_t a = w.size(); a-- > 0;) {
    if (w[a] == i) {
      Word x = w;
      x.erase(x.begin() + static_cast<long>(a));
      r.add(x, QPiScalar::monomial(1, datum_->dot(suffix, i), suffix_parity * datum_->p(i)));
    }
    ++suffix.c[static_cast<size_t>(w[a])];
    suffix_parity += datum_->p(w[a]);
  }
  return r;
}

FreeElement HalfAlgebra::ir(int i, const FreeElement& x) const {
  FreeElement r;
  for (const auto& [w, c] : x.terms) r += ir(i, w).scaled(c);
  return r;
}

FreeElement HalfAlgebra::ri(int i, const FreeElement& x) const {
  FreeElement r;
  for (const auto& [w, c] : x.terms) r += ri(i, w).scaled(c);
  return r;
}

QPiScalar HalfAlgebra::theta_norm(int i) const {
  return (QPiScalar(1) - QPiScalar::monomial(1, -2 * datum_->d(i), datum_->p(i))).inverse();
}

void HalfAlgebra::check_height(const RootWeight& nu) const {
  if (!nu.nonnegative()) throw NegativeWeight("weight " + render_weight(nu) + " is not in N[I]");
  if (nu.height() > height_bound_)
    throw TruncationOverflow("weight " + render_weight(nu) + " exceeds the height bound " +
                             std::to_string(height_bound_));
}

const Matrix& HalfAlgebra::word_gram(const RootWeight& nu) {
  auto it = word_gram_.find(nu);
  if (it != word_gram_.end()) return it->second;
  std::vector<Word> words = words_of_weight(nu);
  std::map<Word, int> index;
  for (size_t k = 0; k < words.size(); ++k) index[words[k]] = static_cast<int>(k);
  const int n = static_cast<int>(words.size());
  Matrix g(n, n);
  if (nu.is_zero()) {
    g(0, 0) = QPiScalar(1);
  } else {
    for (int r = 0; r < n; ++r) {
      const Word& w = words[static_cast<size_t>(r)];
      const int i = w[0];
      Word y(w.begin() + 1, w.end());
      RootWeight sub = nu - RootWeight::simple(datum_->rank(), i);
      const Matrix& gs = word_gram(sub);
      const auto& sub_index = word_index_.at(sub);
      const int yrow = sub_index.at(y);
      for (int c = 0; c < n; ++c) {
        QPiScalar acc;
        for (const auto& [x, coef] : ir(i, words[static_cast<size_t>(c)]).terms) {
          const QPiScalar& v = gs(yrow, sub_index.at(x));
          if (!v.is_zero()) acc += coef * v;
        }
        g(r, c) = acc;
      }
    }
  }
  word_index_[nu] = std::move(index);
  return word_gram_.emplace(nu, std::move(g)).first->second;
}

QPiScalar HalfAlgebra::form_normalized(const Word& x, const Word& y) {
  RootWeight nx = weight(x), ny = weight(y);
  if (nx != ny) return {};
  const Matrix& g = word_gram(nx);
  const auto& idx = word_index_.at(nx);
  return g(idx.at(x), idx.at(y));
}

QPiScalar HalfAlgebra::form(const FreeElement& x, const FreeElement& y) {
  QPiScalar acc;
  for (const auto& [a, ca] : x.terms)
    for (const auto& [b, cb] : y.terms) {
      RootWeight nu = weight(a);
      if (nu != weight(b)) continue;
      QPiScalar v = form_normalized(a, b);
      if (v.is_zero()) continue;
      QPiScalar norm(1);
      for (int i = 0; i < datum_->rank(); ++i)
        for (int k = 0; k < nu[i]; ++k) norm *= theta_norm(i);
      acc += ca * cb * v * norm;
    }
  return acc;
}

namespace {

// Row reduction state for greedy pivot selection in one component.
struct Echelon {
  std::vector<std::vector<RatFunc>> rows;
  std::vector<size_t> pivot_cols;

  // Returns the reduced row; nonzero iff it is independent of the stored rows.
  std::vector<RatFunc> reduce(std::vector<RatFunc> row) const {
    for (size_t k = 0; k < rows.size(); ++k) {
      const RatFunc f = row[pivot_cols[k]];
      if (f.is_zero()) continue;
      for (size_t c = 0; c < row.size(); ++c)
        if (!rows[k][c].is_zero()) row[c] -= f * rows[k][c];
    }
    return row;
  }
  void insert(std::vector<RatFunc> row) {
    size_t pc = 0;
    while (row[pc].is_zero()) ++pc;
    RatFunc inv = row[pc].inverse();
    for (auto& x : row)
      if (!x.is_zero()) x *= inv;
    rows.push_back(std::move(row));
    pivot_cols.push_back(pc);
  }
};

bool nonzero(const std::vector<RatFunc>& v) {
  return std::any_of(v.begin(), v.end(), [](const RatFunc& x) { return !x.is_zero(); });
}

}  // namespace

const QuotientBasis& HalfAlgebra::basis(const RootWeight& nu) {
  auto it = bases_.find(nu);
  if (it != bases_.end()) return it->second;
  check_height(nu);
  QuotientBasis b;
  b.nu = nu;
  b.words = words_of_weight(nu);
  b.gram_words = word_gram(nu);
  const int n = static_cast<int>(b.words.size());

  Echelon ech[2];
  for (int k = 0; k < n; ++k) {
    std::vector<RatFunc> reduced[2];
    for (int s = 0; s < 2; ++s) {
      std::vector<RatFunc> row(static_cast<size_t>(n));
      for (int c = 0; c < n; ++c) row[static_cast<size_t>(c)] = b.gram_words(k, c).component(s == 0 ? 1 : -1);
      reduced[s] = ech[s].reduce(std::move(row));
    }
    if (nonzero(reduced[0]) && nonzero(reduced[1])) {
      ech[0].insert(std::move(reduced[0]));
      ech[1].insert(std::move(reduced[1]));
      b.pivots.push_back(k);
      b.pivot_words.push_back(b.words[static_cast<size_t>(k)]);
    }
  }

  auto null_plus = nullspace(b.gram_words.component(1));
  auto null_minus = nullspace(b.gram_words.component(-1));
  if (null_plus.size() != null_minus.size())
    throw DimensionMismatch("weight " + render_weight(nu) + ": quotient dimensions differ between pi=+1 (" +
                            std::to_string(n - static_cast<int>(null_plus.size())) + ") and pi=-1 (" +
                            std::to_string(n - static_cast<int>(null_minus.size())) + ")");
  if (static_cast<int>(b.pivots.size()) + static_cast<int>(null_plus.size()) != n)
    throw DimensionMismatch("weight " + render_weight(nu) + ": no common pivot words for both components");
  for (size_t k = 0; k < null_plus.size(); ++k) {
    std::vector<QPiScalar> v(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) v[static_cast<size_t>(c)] = QPiScalar(null_plus[k][static_cast<size_t>(c)], null_minus[k][static_cast<size_t>(c)]);
    b.radical.push_back(v);
  }

  const int m = b.dim();
  Matrix gpp(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) gpp(r, c) = b.gram_words(b.pivots[static_cast<size_t>(r)], b.pivots[static_cast<size_t>(c)]);
  b.normalizer = QPiScalar(1);
  for (int i = 0; i < datum_->rank(); ++i)
    for (int k = 0; k < nu[i]; ++k) b.normalizer *= QPiScalar(1) - QPiScalar::monomial(1, -2 * datum_->d(i), datum_->p(i));
  QPiScalar inv_norm = b.normalizer.inverse();
  b.gram = Matrix(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) b.gram(r, c) = gpp(r, c) * inv_norm;
  b.gram_normalized_inv = inverse(gpp);
  b.gram_inv = Matrix(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) b.gram_inv(r, c) = b.gram_normalized_inv(r, c) * b.normalizer;
  return bases_.emplace(nu, std::move(b)).first->second;
}

std::vector<QPiScalar> HalfAlgebra::word_coords(const Word& w) {
  auto it = coords_.find(w);
  if (it != coords_.end()) return it->second;
  RootWeight nu = weight(w);
  const QuotientBasis& b = basis(nu);
  const int col = word_index_.at(nu).at(w);
  const int m = b.dim();
  std::vector<QPiScalar> rhs(static_cast<size_t>(m));
  for (int r = 0; r < m; ++r) rhs[static_cast<size_t>(r)] = b.gram_words(b.pivots[static_cast<size_t>(r)], col);
  std::vector<QPiScalar> c = b.gram_normalized_inv * rhs;
  coords_.emplace(w, c);
  return c;
}

HalfVec HalfAlgebra::zero(const RootWeight& nu) {
  return HalfVec{nu, std::vector<QPiScalar>(static_cast<size_t>(dim(nu)))};
}

HalfVec HalfAlgebra::unit(const RootWeight& nu, int k) {
  HalfVec v = zero(nu);
  v.c[static_cast<size_t>(k)] = QPiScalar(1);
  return v;
}

HalfVec HalfAlgebra::one() { return unit(RootWeight::zero(datum_->rank()), 0); }

HalfVec HalfAlgebra::reduce(const FreeElement& x, const RootWeight& nu) {
  HalfVec v = zero(nu);
  for (const auto& [w, c] : x.terms) {
    if (weight(w) != nu) throw DimensionMismatch("element is not homogeneous of weight " + render_weight(nu));
    auto wc = word_coords(w);
    for (size_t k = 0; k < wc.size(); ++k)
      if (!wc[k].is_zero()) v.c[k] += c * wc[k];
  }
  return v;
}

HalfVec HalfAlgebra::reduce(const FreeElement& x) {
  if (x.is_zero()) throw DimensionMismatch("cannot infer the weight of the zero element");
  return reduce(x, weight(x.terms.begin()->first));
}

FreeElement HalfAlgebra::lift(const HalfVec& v) {
  FreeElement r;
  if (v.c.empty()) return r;
  const QuotientBasis& b = basis(v.nu);
  for (size_t k = 0; k < v.c.size(); ++k) r.add(b.pivot_words[k], v.c[k]);
  return r;
}

namespace {

HalfVec apply(const Matrix& m, const HalfVec& v, const RootWeight& target) {
  return HalfVec{target, m * v.c};
}

}  // namespace

HalfVec HalfAlgebra::left_mul(int i, const HalfVec& v) {
  RootWeight target = v.nu + RootWeight::simple(datum_->rank(), i);
  auto key = std::make_pair(i, v.nu);
  auto it = left_mul_.find(key);
  if (it == left_mul_.end()) {
    const QuotientBasis& b = basis(v.nu);
    const int rows = dim(target);
    Matrix m(rows, b.dim());
    for (int k = 0; k < b.dim(); ++k) {
      Word w{i};
      w.insert(w.end(), b.pivot_words[static_cast<size_t>(k)].begin(), b.pivot_words[static_cast<size_t>(k)].end());
      m.set_column(k, word_coords(w));
    }
    it = left_mul_.emplace(key, std::move(m)).first;
  }
  return apply(it->second, v, target);
}

HalfVec HalfAlgebra::right_mul(const HalfVec& v, int i) {
  HalfVec r = zero(v.nu + RootWeight::simple(datum_->rank(), i));
  const QuotientBasis& b = basis(v.nu);
  for (int k = 0; k < b.dim(); ++k) {
    if (v.c[static_cast<size_t>(k)].is_zero()) continue;
    Word w = b.pivot_words[static_cast<size_t>(k)];
    w.push_back(i);
    r.c = add(r.c, scale(v.c[static_cast<size_t>(k)], word_coords(w)));
  }
  return r;
}

HalfVec HalfAlgebra::multiply(const HalfVec& a, const HalfVec& b) {
  HalfVec r = zero(a.nu + b.nu);
  const QuotientBasis& ba = basis(a.nu);
  const QuotientBasis& bb = basis(b.nu);
  for (int k = 0; k < ba.dim(); ++k) {
    if (a.c[static_cast<size_t>(k)].is_zero()) continue;
    for (int l = 0; l < bb.dim(); ++l) {
      if (b.c[static_cast<size_t>(l)].is_zero()) continue;
      Word w = ba.pivot_words[static_cast<size_t>(k)];
      w.insert(w.end(), bb.pivot_words[static_cast<size_t>(l)].begin(), bb.pivot_words[static_cast<size_t>(l)].end());
      r.c = add(r.c, scale(a.c[static_cast<size_t>(k)] * b.c[static_cast<size_t>(l)], word_coords(w)));
    }
  }
  return r;
}

HalfVec HalfAlgebra::ir(int i, const HalfVec& v) {
  RootWeight target = v.nu - RootWeight::simple(datum_->rank(), i);
  if (!target.nonnegative()) return HalfVec{target, {}};
  auto key = std::make_pair(i, v.nu);
  auto it = ir_.find(key);
  if (it == ir_.end()) {
    const QuotientBasis& b = basis(v.nu);
    Matrix m(dim(target), b.dim());
    for (int k = 0; k < b.dim(); ++k) m.set_column(k, reduce(ir(i, b.pivot_words[static_cast<size_t>(k)]), target).c);
    it = ir_.emplace(key, std::move(m)).first;
  }
  return apply(it->second, v, target);
}

HalfVec HalfAlgebra::ri(int i, const HalfVec& v) {
  RootWeight target = v.nu - RootWeight::simple(datum_->rank(), i);
  if (!target.nonnegative()) return HalfVec{target, {}};
  auto key = std::make_pair(i, v.nu);
  auto it = ri_.find(key);
  if (it == ri_.end()) {
    const QuotientBasis& b = basis(v.nu);
    Matrix m(dim(target), b.dim());
    for (int k = 0; k < b.dim(); ++k) m.set_column(k, reduce(ri(i, b.pivot_words[static_cast<size_t>(k)]), target).c);
    it = ri_.emplace(key, std::move(m)).first;
  }
  return apply(it->second, v, target);
}

HalfVec HalfAlgebra::bar(const HalfVec& v) const {
  HalfVec r = v;
  for (auto& x : r.c) x = x.bar();
  return r;
}

QPiScalar HalfAlgebra::form(const HalfVec& a, const HalfVec& b) {
  if (a.nu != b.nu) return {};
  const QuotientBasis& qb = basis(a.nu);
  std::vector<QPiScalar> gb = qb.gram * b.c;
  QPiScalar acc;
  for (size_t k = 0; k < a.c.size(); ++k)
    if (!a.c[k].is_zero()) acc += a.c[k] * gb[k];
  return acc;
}

HalfVec HalfAlgebra::dual(const RootWeight& nu, int l) {
  const QuotientBasis& b = basis(nu);
  return HalfVec{nu, b.gram_inv.column(l)};
}

FreeElement HalfAlgebra::serre_element(int i, int j) const {
  if (i == j) throw SameIndex("Serre element needs distinct indices");
  const int a = datum_->a(i, j);
  const int top = 1 - a;
  const int di = datum_->d(i);
  FreeElement r;
  for (int n = 0; n <= top; ++n) {
    Word w(static_cast<size_t>(n), i);
    w.push_back(j);
    w.insert(w.end(), static_cast<size_t>(top - n), i);
    int pe = datum_->p(i) * (n * datum_->p(j) + n * (n - 1) / 2);
    QPiScalar c = qpi_binomial(top, n, di).shifted(0, pe);
    r.add(w, (n % 2 == 0) ? c : -c);
  }
  return r;
}

FreeElement HalfAlgebra::divided_power(int i, int m) const {
  return FreeElement::word(Word(static_cast<size_t>(m), i), qpi_factorial(m, datum_->d(i)).inverse());
}

}  // namespace qcov
