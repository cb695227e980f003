#include "qcov/modules.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qcov {

namespace {

Matrix scaled(const Matrix& m, const QPiScalar& c) {
  Matrix r = m;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j)
      if (!r(i, j).is_zero()) r(i, j) *= c;
  return r;
}

Matrix diagonal(const std::vector<QPiScalar>& d) {
  Matrix r(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) r(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return r;
}

Vec unit_vec(int n, int k) {
  Vec v(static_cast<size_t>(n));
  v[static_cast<size_t>(k)] = QPiScalar(1);
  return v;
}

Vec bar_vec(const Vec& v) {
  Vec r = v;
  for (auto& x : r) x = x.bar();
  return r;
}

// Height of lambda2 - lambda when it lies in N[I], else nullopt.
std::optional<int> height_above(const Datum& d, const XWeight& lambda, const XWeight& lambda2) {
  auto diff = d.root_difference(lambda, lambda2);
  if (!diff || !diff->nonnegative()) return std::nullopt;
  return diff->height();
}

bool strictly_below(const Datum& d, const XWeight& a, const XWeight& b) {
  auto h = height_above(d, a, b);
  return h && *h > 0;
}

std::vector<RatFunc> rmul(const RMatrix& m, const std::vector<RatFunc>& v) {
  std::vector<RatFunc> r(m.size());
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j)
      if (!m[i][j].is_zero() && !v[j].is_zero()) r[i] += m[i][j] * v[j];
  return r;
}

// Row-reduced spanning set of one pi-component.
struct Span {
  RMatrix rows;
  std::vector<int> pivots;
  int n = 0;

  // Reduce v against the current rows.
  std::vector<RatFunc> reduce(std::vector<RatFunc> v) const {
    for (size_t r = 0; r < rows.size(); ++r) {
      RatFunc c = v[static_cast<size_t>(pivots[r])];
      if (c.is_zero()) continue;
      for (int j = 0; j < n; ++j)
        if (!rows[r][static_cast<size_t>(j)].is_zero()) v[static_cast<size_t>(j)] -= c * rows[r][static_cast<size_t>(j)];
    }
    return v;
  }
  bool insert(const std::vector<RatFunc>& v) {
    std::vector<RatFunc> w = reduce(v);
    auto it = std::find_if(w.begin(), w.end(), [](const RatFunc& x) { return !x.is_zero(); });
    if (it == w.end()) return false;
    rows.push_back(w);
    RMatrix m = rows;
    pivots = rref(m);
    m.resize(pivots.size());
    rows = m;
    return true;
  }
};

std::vector<RatFunc> component(const Vec& v, int sign) {
  std::vector<RatFunc> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(x.component(sign));
  return r;
}

QPiScalar negative_part(const QPiScalar& s, bool* integral) {
  auto a = s.a_part().as_integral_laurent();
  auto b = s.b_part().as_integral_laurent();
  if (!a || !b) {
    *integral = false;
    return QPiScalar();
  }
  auto neg = [](const LaurentPoly& p) {
    std::vector<Integer> c;
    for (int e = p.low(); e < 0 && e <= p.high(); ++e) c.push_back(p.coeff(e));
    return c.empty() ? LaurentPoly() : LaurentPoly::from_coeffs(c, p.low());
  };
  return QPiScalar::from_ab(RatFunc(neg(*a)), RatFunc(neg(*b)));
}

// Linear extension of a strict partial order on 0..n-1.
std::vector<int> linear_extension(int n, const BasisOrder& less, bool reverse_ties) {
  std::vector<int> out;
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int t = 0; t < n; ++t) {
      int c = reverse_ties ? n - 1 - t : t;
      if (used[static_cast<size_t>(c)]) continue;
      bool minimal = true;
      for (int o = 0; o < n && minimal; ++o)
        if (!used[static_cast<size_t>(o)] && o != c && less(o, c)) minimal = false;
      if (minimal) {
        pick = c;
        break;
      }
    }
    if (pick < 0) throw TriangularityFailure("basis order has a cycle");
    used[static_cast<size_t>(pick)] = true;
    out.push_back(pick);
  }
  return out;
}

XWeight weight_of_column(const WeightModule& m, const Matrix& p, int col) {
  std::optional<XWeight> w;
  for (int r = 0; r < p.rows(); ++r) {
    if (p(r, col).is_zero()) continue;
    if (!w) {
      w = m.weights[static_cast<size_t>(r)];
    } else if (*w != m.weights[static_cast<size_t>(r)]) {
      throw ConsistencyFailure("new basis vector " + std::to_string(col) + " is not a weight vector");
    }
  }
  if (!w) throw ConsistencyFailure("zero vector in change of basis");
  return *w;
}

}  // namespace

Vec AntiLinear::operator()(const Vec& v) const { return m * bar_vec(v); }

Matrix WeightModule::K(const YCoweight& mu) const {
  std::vector<QPiScalar> d;
  for (const auto& w : weights) d.push_back(QPiScalar::monomial(1, Datum::pair(mu, w), 0));
  return diagonal(d);
}

Matrix WeightModule::J(const YCoweight& mu) const {
  std::vector<QPiScalar> d;
  for (const auto& w : weights) d.push_back(QPiScalar::monomial(1, 0, ((Datum::pair(mu, w) % 2) + 2) % 2));
  return diagonal(d);
}

Matrix WeightModule::e_word(const Word& w) const {
  Matrix r = Matrix::identity(dim());
  for (int i : w) r = r * E[static_cast<size_t>(i)];
  return r;
}

Matrix WeightModule::f_word(const Word& w) const {
  Matrix r = Matrix::identity(dim());
  for (int i : w) r = r * F[static_cast<size_t>(i)];
  return r;
}

int WeightModule::depth() const {
  int best = 0;
  for (const auto& a : weights)
    for (const auto& b : weights) {
      auto h = height_above(*datum, a, b);
      if (h) best = std::max(best, *h);
    }
  return best;
}

WeightModule WeightModule::rebased(const Matrix& p, std::vector<std::string> new_labels) const {
  Matrix inv = inverse(p);
  WeightModule r;
  r.datum = datum;
  r.labels = std::move(new_labels);
  for (int c = 0; c < p.cols(); ++c) {
    r.weights.push_back(weight_of_column(*this, p, c));
    int par = -1;
    for (int row = 0; row < p.rows(); ++row)
      if (!p(row, c).is_zero()) par = parity[static_cast<size_t>(row)];
    r.parity.push_back(par);
  }
  for (size_t i = 0; i < E.size(); ++i) {
    r.E.push_back(inv * E[i] * p);
    r.F.push_back(inv * F[i] * p);
  }
  r.highest = 0;
  for (int c = 0; c < p.cols(); ++c)
    if (!p(highest, c).is_zero()) {
      r.highest = c;
      break;
    }
  return r;
}

Matrix act(CoveringAlgebra& u, const PbwElement& x, const WeightModule& m) {
  HalfAlgebra& f = u.half();
  Matrix r(m.dim(), m.dim());
  std::map<std::pair<RootWeight, int>, Matrix> ecache, fcache;
  for (const auto& [k, c] : x.terms) {
    auto ek = std::make_pair(k.ewt, k.eidx);
    auto fk = std::make_pair(k.fwt, k.fidx);
    if (!ecache.count(ek)) ecache.emplace(ek, m.e_word(f.basis(k.ewt).pivot_words[static_cast<size_t>(k.eidx)]));
    if (!fcache.count(fk)) fcache.emplace(fk, m.f_word(f.basis(k.fwt).pivot_words[static_cast<size_t>(k.fidx)]));
    Matrix t = fcache.at(fk) * m.J(YCoweight(k.j)) * m.K(YCoweight(k.k)) * ecache.at(ek);
    r = r + scaled(t, c);
  }
  return r;
}

Matrix act(CoveringAlgebra& u, const TensorElement& x, const WeightModule& a, const WeightModule& b) {
  std::map<PbwKey, Matrix> ca, cb;
  auto single = [&](std::map<PbwKey, Matrix>& cache, const PbwKey& k, const WeightModule& m) -> const Matrix& {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    PbwElement e;
    e.add(k, QPiScalar(1));
    return cache.emplace(k, act(u, e, m)).first->second;
  };
  std::vector<QPiScalar> sign;
  for (int p : a.parity) sign.push_back(QPiScalar::monomial(1, 0, p));
  Matrix sgn = diagonal(sign);
  Matrix r(a.dim() * b.dim(), a.dim() * b.dim());
  for (const auto& [k, c] : x.terms) {
    Matrix left = single(ca, k.first, a);
    if (u.parity(k.second)) left = left * sgn;
    r = r + scaled(kronecker(left, single(cb, k.second, b)), c);
  }
  return r;
}

WeightModule verma(CoveringAlgebra& u, const XWeight& lambda, int height) {
  HalfAlgebra& f = u.half();
  const Datum& d = u.datum();
  const int n = d.rank();
  WeightModule m;
  m.datum = f.datum_ptr();
  std::map<std::pair<RootWeight, int>, int> index;
  for (const auto& nu : f.weights_upto(height)) {
    const QuotientBasis& b = f.basis(nu);
    for (int l = 0; l < b.dim(); ++l) {
      index.emplace(std::make_pair(nu, l), m.dim());
      m.weights.push_back(lambda - d.to_x(nu));
      m.parity.push_back(d.parity(nu));
      const Word& w = b.pivot_words[static_cast<size_t>(l)];
      m.labels.push_back(w.empty() ? "eta" : "F[" + render_word(d, w) + "]eta");
    }
  }
  const int dim = m.dim();
  for (int i = 0; i < n; ++i) {
    Matrix e(dim, dim), fm(dim, dim);
    for (const auto& [key, col] : index) {
      const auto& [nu, l] = key;
      HalfVec v = f.unit(nu, l);
      if (nu.height() < height) {
        HalfVec w = f.left_mul(i, v);
        for (size_t t = 0; t < w.c.size(); ++t)
          if (!w.c[t].is_zero()) fm(index.at({w.nu, static_cast<int>(t)}), col) = w.c[t];
      }
      PbwElement y = u.lmul_E(i, u.minus(v));
      for (const auto& [k, c] : y.terms) {
        if (!k.ewt.is_zero()) continue;
        const int pe = Datum::pair(YCoweight(k.j), lambda);
        const int qe = Datum::pair(YCoweight(k.k), lambda);
        e(index.at({k.fwt, k.fidx}), col) += c.shifted(qe, ((pe % 2) + 2) % 2);
      }
    }
    m.E.push_back(e);
    m.F.push_back(fm);
  }
  m.highest = 0;
  return m;
}

WeightModule simple(CoveringAlgebra& u, const XWeight& lambda, int height) {
  const Datum& d = u.datum();
  const int n = d.rank();
  std::vector<int> top(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    top[static_cast<size_t>(i)] = d.pair(i, lambda);
    if (top[static_cast<size_t>(i)] < 0)
      throw NotDominant("<" + d.label(i) + ", lambda> = " + std::to_string(top[static_cast<size_t>(i)]) + " is negative");
    if (top[static_cast<size_t>(i)] + 1 > height)
      throw DepthExceeded("height " + std::to_string(height) + " cannot hold F_" + d.label(i) + "^" +
                          std::to_string(top[static_cast<size_t>(i)] + 1) + " eta");
  }
  WeightModule v = verma(u, lambda, height);
  const int dim = v.dim();
  std::vector<Vec> gens;
  for (int i = 0; i < n; ++i) {
    Vec g = unit_vec(dim, v.highest);
    for (int t = 0; t <= top[static_cast<size_t>(i)]; ++t) g = v.F[static_cast<size_t>(i)] * g;
    for (int j = 0; j < n; ++j)
      if (!is_zero(v.E[static_cast<size_t>(j)] * g))
        throw ConsistencyFailure("F_" + d.label(i) + "^(n+1) eta is not a singular vector");
    gens.push_back(g);
  }
  // Submodule U^- gens, one pi-component at a time.
  Span spans[2];
  for (int s = 0; s < 2; ++s) {
    const int sign = s == 0 ? 1 : -1;
    Span& sp = spans[s];
    sp.n = dim;
    std::vector<RMatrix> fc;
    for (int i = 0; i < n; ++i) fc.push_back(v.F[static_cast<size_t>(i)].component(sign));
    std::vector<std::vector<RatFunc>> queue;
    for (const auto& g : gens) queue.push_back(component(g, sign));
    while (!queue.empty()) {
      std::vector<RatFunc> x = queue.back();
      queue.pop_back();
      if (!sp.insert(x)) continue;
      for (int i = 0; i < n; ++i) queue.push_back(rmul(fc[static_cast<size_t>(i)], x));
    }
  }
  if (spans[0].pivots != spans[1].pivots)
    throw ConsistencyFailure("the maximal submodule differs between the two pi-specializations");
  std::set<int> piv(spans[0].pivots.begin(), spans[0].pivots.end());
  std::vector<int> keep;
  for (int k = 0; k < dim; ++k)
    if (!piv.count(k)) keep.push_back(k);
  auto project = [&](const Vec& x) {
    std::vector<RatFunc> p = spans[0].reduce(component(x, 1));
    std::vector<RatFunc> q = spans[1].reduce(component(x, -1));
    Vec r;
    for (int k : keep) r.emplace_back(p[static_cast<size_t>(k)], q[static_cast<size_t>(k)]);
    return r;
  };
  WeightModule m;
  m.datum = v.datum;
  for (int k : keep) {
    m.weights.push_back(v.weights[static_cast<size_t>(k)]);
    m.parity.push_back(v.parity[static_cast<size_t>(k)]);
    m.labels.push_back(v.labels[static_cast<size_t>(k)]);
    auto h = height_above(d, v.weights[static_cast<size_t>(k)], lambda);
    if (h && *h >= height) throw DepthExceeded("L(lambda) reaches the truncation height " + std::to_string(height));
  }
  const int qd = static_cast<int>(keep.size());
  for (int i = 0; i < n; ++i) {
    Matrix e(qd, qd), fm(qd, qd);
    for (int c = 0; c < qd; ++c) {
      Vec col = unit_vec(dim, keep[static_cast<size_t>(c)]);
      e.set_column(c, project(v.E[static_cast<size_t>(i)] * col));
      fm.set_column(c, project(v.F[static_cast<size_t>(i)] * col));
    }
    m.E.push_back(e);
    m.F.push_back(fm);
  }
  m.highest = 0;
  return m;
}

CheckResult audit_relations(CoveringAlgebra& u, const WeightModule& m, int truncation_height) {
  const Datum& d = *m.datum;
  const int n = d.rank();
  CheckResult res;
  const XWeight& top = m.weights[static_cast<size_t>(m.highest)];
  std::vector<bool> edge(static_cast<size_t>(m.dim()), false);
  if (truncation_height >= 0)
    for (int c = 0; c < m.dim(); ++c) {
      auto h = height_above(d, m.weights[static_cast<size_t>(c)], top);
      edge[static_cast<size_t>(c)] = h && *h >= truncation_height;
    }
  auto same_off_edge = [&](const Matrix& a, const Matrix& b) {
    for (int c = 0; c < m.dim(); ++c) {
      if (edge[static_cast<size_t>(c)]) continue;
      for (int r = 0; r < m.dim(); ++r)
        if (a(r, c) != b(r, c)) return false;
    }
    return true;
  };
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m.dim(); ++c)
      for (int r = 0; r < m.dim(); ++r) {
        const XWeight& wc = m.weights[static_cast<size_t>(c)];
        if (!m.E[static_cast<size_t>(i)](r, c).is_zero() && m.weights[static_cast<size_t>(r)] != wc + d.root_x(i))
          res.fail("E_" + d.label(i) + " does not raise the weight by i'");
        if (!m.F[static_cast<size_t>(i)](r, c).is_zero() && m.weights[static_cast<size_t>(r)] != wc - d.root_x(i))
          res.fail("F_" + d.label(i) + " does not lower the weight by i'");
      }
    for (int j = 0; j < n; ++j) {
      const Matrix& e = m.E[static_cast<size_t>(i)];
      const Matrix& f = m.F[static_cast<size_t>(j)];
      Matrix lhs = e * f - scaled(f * e, QPiScalar::monomial(1, 0, d.p(i) * d.p(j)));
      Matrix rhs(m.dim(), m.dim());
      if (i == j) {
        Matrix jk = m.J(d.tilde_y(i)) * m.K(d.tilde_y(i));
        rhs = scaled(jk - m.K(-d.tilde_y(i)), qpi_bracket_denominator(d.d(i), d.p(i)).inverse());
      }
      if (!same_off_edge(lhs, rhs)) res.fail("EF relation fails for (" + d.label(i) + "," + d.label(j) + ")");
      if (i == j) continue;
      FreeElement s = u.half().serre_element(i, j);
      Matrix se(m.dim(), m.dim()), sf(m.dim(), m.dim());
      for (const auto& [w, c] : s.terms) {
        se = se + scaled(m.e_word(w), c);
        sf = sf + scaled(m.f_word(w), c);
      }
      if (!se.is_zero()) res.fail("Serre relation fails for E at (" + d.label(i) + "," + d.label(j) + ")");
      if (!same_off_edge(sf, Matrix(m.dim(), m.dim())))
        res.fail("Serre relation fails for F at (" + d.label(i) + "," + d.label(j) + ")");
    }
  }
  return res;
}

BasedModule canonical_basis_rank1(CoveringAlgebra& u, int n) {
  const Datum& d = u.datum();
  if (d.rank() != 1) throw RankUnsupported("canonical bases are only built for rank one");
  WeightModule l = simple(u, XWeight({n}), n + 1);
  Matrix p(l.dim(), l.dim());
  std::vector<std::string> labels;
  for (int k = 0; k < l.dim(); ++k) {
    p(k, k) = qpi_factorial(k, d.d(0)).inverse();
    labels.push_back(k == 0 ? "eta" : "F^(" + std::to_string(k) + ")eta");
  }
  BasedModule b;
  b.mod = l.rebased(p, labels);
  b.psi.m = Matrix::identity(l.dim());
  return b;
}

BasisOrder order_by_weight(const WeightModule& m) {
  return [&m](int a, int b) {
    return strictly_below(*m.datum, m.weights[static_cast<size_t>(a)], m.weights[static_cast<size_t>(b)]);
  };
}

BasisOrder order_by_weight_reversed(const WeightModule& m) {
  auto d = m.datum;
  auto w = m.weights;
  return [d, w](int a, int b) { return strictly_below(*d, w[static_cast<size_t>(b)], w[static_cast<size_t>(a)]); };
}

bool in_strict_negative(const QPiScalar& x) {
  auto a = x.a_part().as_integral_laurent();
  auto b = x.b_part().as_integral_laurent();
  if (!a || !b) return false;
  return (a->is_zero() || a->high() < 0) && (b->is_zero() || b->high() < 0);
}

Matrix bar_invariant_basis(const AntiLinear& psi, const BasisOrder& order, bool tie_break) {
  const Matrix& m = psi.m;
  const int n = m.rows();
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      const QPiScalar& x = m(r, c);
      if (r == c) {
        if (!x.is_one()) throw TriangularityFailure("diagonal entry " + std::to_string(r) + " is " + to_string(x));
      } else if (!x.is_zero() && !order(r, c)) {
        throw TriangularityFailure("entry (" + std::to_string(r) + "," + std::to_string(c) + ") = " + to_string(x) +
                                   " lies outside the order");
      }
    }
  std::vector<int> ext = linear_extension(n, order, tie_break);
  std::vector<int> pos(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) pos[static_cast<size_t>(ext[static_cast<size_t>(k)])] = k;
  Matrix out(n, n);
  for (int b = 0; b < n; ++b) {
    std::vector<QPiScalar> p(static_cast<size_t>(n));
    p[static_cast<size_t>(b)] = QPiScalar(1);
    std::vector<int> below;
    for (int l = 0; l < n; ++l)
      if (order(l, b)) below.push_back(l);
    std::sort(below.begin(), below.end(), [&](int x, int y) { return pos[static_cast<size_t>(x)] > pos[static_cast<size_t>(y)]; });
    for (int l : below) {
      QPiScalar s;
      for (int k = 0; k < n; ++k) {
        if (k == l || p[static_cast<size_t>(k)].is_zero() || m(l, k).is_zero()) continue;
        s += m(l, k) * p[static_cast<size_t>(k)].bar();
      }
      bool integral = true;
      QPiScalar neg = negative_part(s, &integral);
      if (!integral) throw LatticeNotPreserved("bar-invariant basis needs the non-integral coefficient " + to_string(s));
      p[static_cast<size_t>(l)] = neg;
    }
    out.set_column(b, p);
  }
  for (int b = 0; b < n; ++b) {
    Vec c = out.column(b);
    if (psi(c) != c) throw ConsistencyFailure("no bar-invariant element for basis index " + std::to_string(b));
  }
  return out;
}

RMatrix dense_fixed_basis(const AntiLinear& psi, int sign, const BasisOrder& order, int degree) {
  const int n = psi.m.rows();
  RMatrix ps = psi.m.component(sign);
  RMatrix out(static_cast<size_t>(n), std::vector<RatFunc>(static_cast<size_t>(n)));
  for (int b = 0; b < n; ++b) {
    std::vector<int> below;
    for (int l = 0; l < n; ++l)
      if (order(l, b)) below.push_back(l);
    const int unknowns = static_cast<int>(below.size()) * degree;
    // unknown (t, e): coefficient of q^{-e-1} in p_{below[t]}
    auto var = [&](int t, int e) { return t * degree + e; };
    // Equation rows keyed by (row of the module, exponent of q).
    std::map<std::pair<int, int>, std::vector<Rational>> eq;
    auto row = [&](int r, int e) -> std::vector<Rational>& {
      auto it = eq.find({r, e});
      if (it == eq.end()) it = eq.emplace(std::make_pair(r, e), std::vector<Rational>(static_cast<size_t>(unknowns + 1))).first;
      return it->second;
    };
    auto laurent = [&](const RatFunc& x) {
      if (!x.is_laurent()) throw ConsistencyFailure("psi entry is not a Laurent polynomial");
      return x;
    };
    for (int r = 0; r < n; ++r) {
      // sum_k psi(r,k) bar(p_k) - p_r = 0; p_b = 1 contributes psi(r,b) and -delta_{rb}.
      if (!ps[static_cast<size_t>(r)][static_cast<size_t>(b)].is_zero()) {
        RatFunc x = laurent(ps[static_cast<size_t>(r)][static_cast<size_t>(b)]);
        for (int e = x.num().low(); e <= x.num().high(); ++e)
          row(r, e)[static_cast<size_t>(unknowns)] -= x.scale() * Rational(x.num().coeff(e));
      }
      if (r == b) row(r, 0)[static_cast<size_t>(unknowns)] += 1;
      for (size_t t = 0; t < below.size(); ++t) {
        const int k = below[t];
        const RatFunc& x = ps[static_cast<size_t>(r)][static_cast<size_t>(k)];
        for (int e = 0; e < degree; ++e) {
          // bar(q^{-(e+1)}) = sign^{e+1} q^{e+1}
          const int sh = e + 1;
          const Rational sg = (sign < 0 && sh % 2) ? -1 : 1;
          if (!x.is_zero()) {
            RatFunc y = laurent(x);
            for (int ex = y.num().low(); ex <= y.num().high(); ++ex)
              row(r, ex + sh)[static_cast<size_t>(var(static_cast<int>(t), e))] += sg * y.scale() * Rational(y.num().coeff(ex));
          }
          if (k == r) row(r, -sh)[static_cast<size_t>(var(static_cast<int>(t), e))] -= 1;
        }
      }
    }
    RMatrix a;
    for (const auto& [key, coeffs] : eq) {
      std::vector<RatFunc> line;
      for (const auto& c : coeffs) line.emplace_back(c);
      a.push_back(line);
    }
    std::vector<int> piv = a.empty() ? std::vector<int>{} : rref(a);
    if (std::find(piv.begin(), piv.end(), unknowns) != piv.end())
      throw ConsistencyFailure("dense oracle: no bar-invariant element within the degree bound");
    if (static_cast<int>(piv.size()) != unknowns) throw ConsistencyFailure("dense oracle: solution is not unique");
    out[static_cast<size_t>(b)][static_cast<size_t>(b)] = RatFunc(1);
    for (size_t r = 0; r < piv.size(); ++r) {
      const int v = piv[r];
      const int t = v / degree, e = v % degree;
      out[static_cast<size_t>(below[static_cast<size_t>(t)])][static_cast<size_t>(b)] +=
          a[r][static_cast<size_t>(unknowns)] * RatFunc::q_power(-(e + 1));
    }
  }
  return out;
}

WeightModule tensor_modules(const WeightModule& a, const WeightModule& b) {
  const Datum& d = *a.datum;
  WeightModule t;
  t.datum = a.datum;
  const int na = a.dim(), nb = b.dim();
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < nb; ++y) {
      t.weights.push_back(a.weights[static_cast<size_t>(x)] + b.weights[static_cast<size_t>(y)]);
      t.parity.push_back((a.parity[static_cast<size_t>(x)] + b.parity[static_cast<size_t>(y)]) % 2);
      t.labels.push_back(a.labels[static_cast<size_t>(x)] + " (x) " + b.labels[static_cast<size_t>(y)]);
    }
  std::vector<QPiScalar> sign;
  for (int p : a.parity) sign.push_back(QPiScalar::monomial(1, 0, p));
  Matrix sgn = diagonal(sign);
  Matrix ia = Matrix::identity(na), ib = Matrix::identity(nb);
  for (int i = 0; i < d.rank(); ++i) {
    Matrix s = d.p(i) ? sgn : ia;
    const auto& ea = a.E[static_cast<size_t>(i)];
    const auto& fa = a.F[static_cast<size_t>(i)];
    t.E.push_back(kronecker(ea, ib) + kronecker(a.J(d.tilde_y(i)) * a.K(d.tilde_y(i)) * s, b.E[static_cast<size_t>(i)]));
    t.F.push_back(kronecker(fa, b.K(-d.tilde_y(i))) + kronecker(s, b.F[static_cast<size_t>(i)]));
  }
  t.highest = a.highest * nb + b.highest;
  return t;
}

BasisOrder order_pairs(const WeightModule& a, const WeightModule& b) {
  auto d = a.datum;
  auto wa = a.weights, wb = b.weights;
  const int nb = b.dim();
  return [d, wa, wb, nb](int x, int y) {
    const auto& ax = wa[static_cast<size_t>(x / nb)];
    const auto& ay = wa[static_cast<size_t>(y / nb)];
    if (ax + wb[static_cast<size_t>(x % nb)] != ay + wb[static_cast<size_t>(y % nb)]) return false;
    return strictly_below(*d, ax, ay);
  };
}

TensorModule tensor(CoveringAlgebra& u, const BasedModule& a, const BasedModule& b) {
  TensorModule t;
  t.pairs = tensor_modules(a.mod, b.mod);
  const int bound = std::min(a.mod.depth(), b.mod.depth());
  if (bound > u.height_bound()) throw DepthExceeded("Theta needed to height " + std::to_string(bound));
  ThetaExpansion th = theta(u, bound);
  Matrix tm = act(u, th.total(), a.mod, b.mod);
  t.psi_pairs.m = tm * kronecker(a.psi.m, b.psi.m);
  if (!t.psi_pairs.involutive()) throw ConsistencyFailure("Theta o (psi (x) psi) is not an involution");
  t.change = bar_invariant_basis(t.psi_pairs, order_pairs(a.mod, b.mod));
  std::vector<std::string> labels;
  for (const auto& l : t.pairs.labels) {
    std::string s = l;
    auto at = s.find(" (x) ");
    labels.push_back(s.replace(at, 5, " <> "));
  }
  t.diamond.mod = t.pairs.rebased(t.change, labels);
  t.diamond.psi.m = inverse(t.change) * t.psi_pairs.m * t.change.bar();
  if (!t.diamond.psi.m.is_identity()) throw ConsistencyFailure("psi is not the identity on the diamond basis");
  return t;
}

namespace {

PbwElement upsilon_upto(CoveringAlgebra& u, const UpsilonExpansion& ups, int depth) {
  PbwElement r;
  for (const auto& [mu, v] : ups.parts)
    if (mu.height() <= depth) r += u.plus(v);
  return r;
}

}  // namespace

AntiLinear psi_i_module(CoveringAlgebra& u, const UpsilonExpansion& ups, const BasedModule& m) {
  const int depth = m.mod.depth();
  if (ups.bound < depth) throw DepthExceeded("Upsilon known to height " + std::to_string(ups.bound) + ", module depth " + std::to_string(depth));
  if (u.height_bound() < depth) throw DepthExceeded("U truncated below the module depth");
  AntiLinear r;
  r.m = act(u, upsilon_upto(u, ups, depth), m.mod) * m.psi.m;
  return r;
}

AntiLinear psi_i_tensor(CoveringAlgebra& u, const UpsilonExpansion& ups, const ThetaIExpansion& ti,
                        const BasedModule& a, const BasedModule& b, const TensorModule& t) {
  const int need = a.mod.depth() + b.mod.depth();
  if (ti.bound < need) throw DepthExceeded("Theta^i known to height " + std::to_string(ti.bound) + ", need " + std::to_string(need));
  AntiLinear pa = psi_i_module(u, ups, a);
  Matrix th = act(u, ti.total(), a.mod, b.mod);
  Matrix pairs = th * kronecker(pa.m, b.psi.m);
  AntiLinear r;
  r.m = inverse(t.change) * pairs * t.change.bar();
  return r;
}

CheckResult verify_psi_i_intertwines(CoveringAlgebra& u, const IParams& p, const WeightModule& m,
                                     const AntiLinear& psi_i_op) {
  CheckResult res;
  if (!psi_i_op.involutive()) res.fail("psi_i is not an involution");
  for (int i = 0; i < m.datum->rank(); ++i) {
    Matrix b = act(u, embed_b(u, p, i), m);
    if (!(psi_i_op.m * b.bar() == b * psi_i_op.m)) res.fail("psi_i(B_i m) != B_i psi_i(m) for i=" + m.datum->label(i));
    Matrix j = m.J(m.datum->tilde_y(i));
    if (!(psi_i_op.m * j.bar() == j * psi_i_op.m)) res.fail("psi_i does not commute with J~_" + m.datum->label(i));
  }
  return res;
}

std::optional<std::string> first_non_integral(const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (!m(r, c).in_integral_form())
        return "entry (" + std::to_string(r) + "," + std::to_string(c) + ") = " + to_string(m(r, c));
  return std::nullopt;
}

void require_integral(const Matrix& m, const std::string& what) {
  if (auto bad = first_non_integral(m)) throw LatticeNotPreserved(what + " leaves the integral lattice: " + *bad);
}

ICanonicalBasis icanonical_basis(const WeightModule& m, const AntiLinear& psi_i_op) {
  require_integral(psi_i_op.m, "psi_i");
  ICanonicalBasis r;
  r.psi_i = psi_i_op;
  r.order = order_by_weight_reversed(m);
  r.change = bar_invariant_basis(psi_i_op, r.order);
  return r;
}

namespace {

BasedModule tensor_chain(CoveringAlgebra& u, const std::vector<int>& lambdas) {
  BasedModule acc = canonical_basis_rank1(u, lambdas.front());
  for (size_t k = 1; k < lambdas.size(); ++k) acc = tensor(u, acc, canonical_basis_rank1(u, lambdas[k])).diamond;
  return acc;
}

// Index of the single nonzero entry when v lies in B u pi B.
std::optional<int> as_unit(const Vec& v) {
  static const QPiScalar pi = QPiScalar::monomial(1, 0, 1);
  std::optional<int> at;
  for (size_t k = 0; k < v.size(); ++k) {
    if (v[k].is_zero()) continue;
    if (at || !(v[k].is_one() || v[k] == pi)) return std::nullopt;
    at = static_cast<int>(k);
  }
  return at;
}

}  // namespace

bool chi_check(CoveringAlgebra& u, const std::vector<int>& lambdas, std::string* detail) {
  if (u.datum().rank() != 1) throw RankUnsupported("chi_check is rank one");
  int total = 0;
  for (int l : lambdas) total += l;
  BasedModule target = canonical_basis_rank1(u, total);
  BasedModule t = tensor_chain(u, lambdas);
  const Matrix& f = t.mod.F[0];
  Vec v = unit_vec(t.mod.dim(), t.mod.highest);
  std::vector<Vec> images;
  for (int k = 0; k <= total; ++k) {
    if (k > 0) v = f * v;
    images.push_back(scale(qpi_factorial(k).inverse(), v));
  }
  // U-linearity on E: chi(E b) = E chi(b).
  for (int k = 0; k <= total; ++k) {
    Vec eb = target.mod.E[0] * unit_vec(target.mod.dim(), k);
    Vec lhs(static_cast<size_t>(t.mod.dim()));
    for (int j = 0; j <= total; ++j)
      if (!eb[static_cast<size_t>(j)].is_zero()) lhs = add(lhs, scale(eb[static_cast<size_t>(j)], images[static_cast<size_t>(j)]));
    if (lhs != t.mod.E[0] * images[static_cast<size_t>(k)]) {
      if (detail) *detail = "chi does not commute with E at k=" + std::to_string(k);
      return false;
    }
  }
  for (int k = 0; k <= total; ++k)
    if (!as_unit(images[static_cast<size_t>(k)])) {
      if (detail) *detail = "chi(F^(" + std::to_string(k) + ")eta) is not a diamond basis element";
      return false;
    }
  return true;
}

bool submodule_check(CoveringAlgebra& u, int lambda, int mu, std::string* detail) {
  if (u.datum().rank() != 1) throw RankUnsupported("submodule_check is rank one");
  BasedModule t = tensor_chain(u, {lambda, mu});
  const int n = t.mod.dim();
  if (!is_zero(t.mod.E[0] * unit_vec(n, t.mod.highest))) {
    if (detail) *detail = "eta (x) eta is not a highest weight vector";
    return false;
  }
  std::vector<Vec> gens;
  Vec v = unit_vec(n, t.mod.highest);
  while (!is_zero(v)) {
    gens.push_back(v);
    v = t.mod.F[0] * v;
  }
  std::set<int> support;
  for (const auto& g : gens)
    for (int k = 0; k < n; ++k)
      if (!g[static_cast<size_t>(k)].is_zero()) support.insert(k);
  for (int sign : {1, -1}) {
    RMatrix m;
    for (const auto& g : gens) m.push_back(component(g, sign));
    if (rank_of(m) != static_cast<int>(support.size())) {
      if (detail) *detail = "U(eta (x) eta) is not spanned by the diamond elements it touches";
      return false;
    }
  }
  return true;
}

namespace {

// The U-map M -> M' with g -> g', built on the words in E and F applied to g.
// Returns nullopt if g does not generate M or the map is not well defined.
std::optional<Matrix> generated_map(const WeightModule& m, int g, const WeightModule& mp, int gp) {
  const int n = m.dim();
  std::vector<Vec> vs, ws;
  RMatrix rows[2];
  std::vector<std::pair<Vec, Vec>> queue{{unit_vec(n, g), unit_vec(mp.dim(), gp)}};
  for (size_t head = 0; head < queue.size() && static_cast<int>(vs.size()) < n; ++head) {
    auto [v, w] = queue[head];
    bool fresh = true;
    for (int s = 0; s < 2; ++s) {
      RMatrix t = rows[s];
      t.push_back(component(v, s == 0 ? 1 : -1));
      if (rank_of(t) != static_cast<int>(t.size())) fresh = false;
    }
    if (!fresh) continue;
    for (int s = 0; s < 2; ++s) rows[s].push_back(component(v, s == 0 ? 1 : -1));
    vs.push_back(v);
    ws.push_back(w);
    for (size_t i = 0; i < m.E.size(); ++i) {
      queue.emplace_back(m.E[i] * v, mp.E[i] * w);
      queue.emplace_back(m.F[i] * v, mp.F[i] * w);
    }
  }
  if (static_cast<int>(vs.size()) != n) return std::nullopt;
  Matrix vm(n, n), wm(mp.dim(), n);
  for (int c = 0; c < n; ++c) {
    vm.set_column(c, vs[static_cast<size_t>(c)]);
    wm.set_column(c, ws[static_cast<size_t>(c)]);
  }
  Matrix p = wm * inverse(vm);
  for (size_t i = 0; i < m.E.size(); ++i)
    if (!(p * m.E[i] == mp.E[i] * p) || !(p * m.F[i] == mp.F[i] * p)) return std::nullopt;
  return p;
}

}  // namespace

StabilizationReport stabilization(CoveringAlgebra& u, const UpsilonExpansion& ups, int a, int b, int lambda,
                                  int mu, int steps) {
  if (u.datum().rank() != 1) throw RankUnsupported("stabilization is rank one");
  StabilizationReport rep;
  rep.a = a;
  rep.b = b;
  rep.lambda = lambda;
  rep.mu = mu;
  std::optional<BasedModule> prev;
  for (int nu = 0; nu < steps; ++nu) {
    const int l = lambda + nu, m = mu + nu;
    const int nb = m + 1;
    StabilizationStep st;
    st.nu = nu;
    BasedModule d = tensor(u, canonical_basis_rank1(u, l), canonical_basis_rank1(u, m)).diamond;
    // xi (x) eta, xi the lowest weight vector of L(l)
    const int gen = l * nb;
    if (a <= l && b <= m) {
      AntiLinear psi = psi_i_module(u, ups, d);
      ICanonicalBasis icb = icanonical_basis(d.mod, psi);
      st.element = icb.change.column((l - a) * nb + b);
      st.psi_i_invariant = psi(st.element) == st.element;
      for (int x = 0; x < d.mod.dim(); ++x)
        if (!st.element[static_cast<size_t>(x)].is_zero())
          st.coefficients.emplace(std::make_pair(l - x / nb, x % nb), st.element[static_cast<size_t>(x)]);
    }
    if (prev) {
      auto p = generated_map(d.mod, gen, prev->mod, (l - 1) * m);
      if (!p) {
        rep.projection_linear = false;
      } else if (!rep.stable_from && !st.element.empty() && !rep.steps.back().element.empty()) {
        // canonical bases are pi-bases: the image may carry a factor pi
        const Vec img = *p * st.element;
        const Vec& want = rep.steps.back().element;
        if (img == want || img == scale(QPiScalar::monomial(1, 0, 1), want)) rep.stable_from = nu - 1;
      }
    }
    rep.steps.push_back(st);
    prev = d;
  }
  return rep;
}

}  // namespace qcov
