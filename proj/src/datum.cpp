#include "qcov/datum.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace qcov {

// ---------------------------------------------------------------- weights

RootWeight RootWeight::simple(int rank, int i) {
  RootWeight w = zero(rank);
  w.c[static_cast<size_t>(i)] = 1;
  return w;
}

int RootWeight::height() const { return std::accumulate(c.begin(), c.end(), 0); }
bool RootWeight::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](int x) { return x == 0; });
}
bool RootWeight::nonnegative() const {
  return std::all_of(c.begin(), c.end(), [](int x) { return x >= 0; });
}
RootWeight RootWeight::operator+(const RootWeight& o) const {
  RootWeight r = *this;
  for (size_t k = 0; k < c.size(); ++k) r.c[k] += o.c[k];
  return r;
}
RootWeight RootWeight::operator-(const RootWeight& o) const {
  RootWeight r = *this;
  for (size_t k = 0; k < c.size(); ++k) r.c[k] -= o.c[k];
  return r;
}
RootWeight RootWeight::operator*(int k) const {
  RootWeight r = *this;
  for (auto& x : r.c) x *= k;
  return r;
}

LatticeVector LatticeVector::operator+(const LatticeVector& o) const {
  LatticeVector r = *this;
  for (size_t k = 0; k < c.size(); ++k) r.c[k] += o.c[k];
  return r;
}
LatticeVector LatticeVector::operator-(const LatticeVector& o) const {
  LatticeVector r = *this;
  for (size_t k = 0; k < c.size(); ++k) r.c[k] -= o.c[k];
  return r;
}
LatticeVector LatticeVector::operator-() const { return *this * -1; }
LatticeVector LatticeVector::operator*(int k) const {
  LatticeVector r = *this;
  for (auto& x : r.c) x *= k;
  return r;
}
bool LatticeVector::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](int x) { return x == 0; });
}

std::string render_weight(const RootWeight& nu) {
  std::string s;
  for (size_t k = 0; k < nu.c.size(); ++k) s += (k ? "," : "") + std::to_string(nu.c[k]);
  return s;
}

std::string render_lattice(const LatticeVector& v) {
  std::string s = "[";
  for (size_t k = 0; k < v.c.size(); ++k) s += (k ? "," : "") + std::to_string(v.c[k]);
  return s + "]";
}

// ---------------------------------------------------------------- linear algebra over Q

namespace {

// Solves M x = b (M given as columns) over Q; nullopt if inconsistent.
// Columns are assumed linearly independent.
std::optional<std::vector<Rational>> solve_columns(const std::vector<std::vector<int>>& cols,
                                                   const std::vector<int>& b) {
  const size_t n = cols.size();
  const size_t m = b.size();
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(n + 1));
  for (size_t r = 0; r < m; ++r) {
    for (size_t k = 0; k < n; ++k) a[r][k] = cols[k][r];
    a[r][n] = b[r];
  }
  size_t row = 0;
  std::vector<size_t> pivcol;
  for (size_t col = 0; col < n && row < m; ++col) {
    size_t piv = row;
    while (piv < m && a[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(a[piv], a[row]);
    for (size_t r = 0; r < m; ++r) {
      if (r == row || a[r][col] == 0) continue;
      Rational f = a[r][col] / a[row][col];
      for (size_t k = col; k <= n; ++k) a[r][k] -= f * a[row][k];
    }
    pivcol.push_back(col);
    ++row;
  }
  for (size_t r = row; r < m; ++r)
    if (a[r][n] != 0) return std::nullopt;
  std::vector<Rational> x(n, Rational(0));
  for (size_t r = 0; r < pivcol.size(); ++r) x[pivcol[r]] = a[r][n] / a[r][pivcol[r]];
  return x;
}

int integer_rank(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) return 0;
  std::vector<std::vector<Rational>> a;
  for (const auto& r : rows) a.emplace_back(r.begin(), r.end());
  const size_t m = a.size(), n = a[0].size();
  size_t row = 0;
  for (size_t col = 0; col < n && row < m; ++col) {
    size_t piv = row;
    while (piv < m && a[piv][col] == 0) ++piv;
    if (piv == m) continue;
    std::swap(a[piv], a[row]);
    for (size_t r = row + 1; r < m; ++r) {
      Rational f = a[r][col] / a[row][col];
      for (size_t k = col; k < n; ++k) a[r][k] -= f * a[row][k];
    }
    ++row;
  }
  return static_cast<int>(row);
}

// Row Hermite normal form of the integer lattice spanned by rows.
std::vector<std::vector<long>> hermite_rows(std::vector<std::vector<long>> rows, size_t n) {
  std::vector<std::vector<long>> out;
  for (size_t col = 0; col < n; ++col) {
    for (;;) {
      size_t best = rows.size();
      for (size_t r = 0; r < rows.size(); ++r)
        if (rows[r][col] != 0 && (best == rows.size() || std::labs(rows[r][col]) < std::labs(rows[best][col])))
          best = r;
      if (best == rows.size()) break;
      bool done = true;
      for (size_t r = 0; r < rows.size(); ++r) {
        if (r == best || rows[r][col] == 0) continue;
        long f = rows[r][col] / rows[best][col];
        for (size_t k = 0; k < n; ++k) rows[r][k] -= f * rows[best][k];
        if (rows[r][col] != 0) done = false;
      }
      if (done) {
        auto piv = rows[best];
        rows.erase(rows.begin() + static_cast<long>(best));
        if (piv[col] < 0)
          for (auto& x : piv) x = -x;
        out.push_back(piv);
        break;
      }
    }
  }
  // reduce entries above pivots
  for (size_t r = 0; r < out.size(); ++r) {
    size_t col = 0;
    while (out[r][col] == 0) ++col;
    for (size_t s = 0; s < r; ++s) {
      long v = out[s][col];
      long h = out[r][col];
      long f = v >= 0 ? v / h : -((-v + h - 1) / h);
      for (size_t k = 0; k < n; ++k) out[s][k] -= f * out[r][k];
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Datum

Datum::Datum(std::string name, SuperCartanDatum cartan, RootDatum root)
    : name_(std::move(name)), cartan_(std::move(cartan)), root_(std::move(root)) {
  if (cartan_.labels.empty())
    for (int i = 0; i < cartan_.rank(); ++i) cartan_.labels.push_back(std::to_string(i + 1));
}

int Datum::dot(const RootWeight& nu, int i) const {
  int s = 0;
  for (int j = 0; j < rank(); ++j) s += nu[j] * dot(j, i);
  return s;
}

int Datum::dot(const RootWeight& a, const RootWeight& b) const {
  int s = 0;
  for (int i = 0; i < rank(); ++i) s += a[i] * dot(b, i);
  return s;
}

int Datum::parity(const RootWeight& nu) const {
  int s = 0;
  for (int i = 0; i < rank(); ++i) s += nu[i] * p(i);
  return ((s % 2) + 2) % 2;
}

XWeight Datum::root_x(int i) const { return XWeight(root_.roots[static_cast<size_t>(i)]); }
YCoweight Datum::coroot_y(int i) const { return YCoweight(root_.coroots[static_cast<size_t>(i)]); }
YCoweight Datum::tilde_y(int i) const { return coroot_y(i) * d(i); }

XWeight Datum::to_x(const RootWeight& nu) const {
  XWeight r = XWeight::zero(x_rank());
  for (int i = 0; i < rank(); ++i) r = r + root_x(i) * nu[i];
  return r;
}

int Datum::pair(const YCoweight& mu, const XWeight& lambda) {
  int s = 0;
  for (int k = 0; k < mu.size(); ++k) s += mu[k] * lambda[k];
  return s;
}

WeightStats Datum::weight_stats(const RootWeight& nu) const {
  if (!nu.nonnegative()) throw NegativeWeight("weight " + render_weight(nu) + " has a negative coefficient");
  WeightStats st;
  st.height = nu.height();
  st.parity = parity(nu);
  int qe = 0, pe = 0, odd = 0;
  for (int i = 0; i < rank(); ++i) {
    qe += nu[i] * d(i);
    pe += nu[i] * p(i);
    if (p(i) == 1) odd += nu[i];
  }
  st.q_nu = QPiScalar::monomial(1, qe, 0);
  st.pi_nu = QPiScalar::monomial(1, 0, pe);
  st.e_nu = odd * (odd - 1) / 2;
  return st;
}

std::optional<RootWeight> Datum::root_difference(const XWeight& lambda, const XWeight& lambda2) const {
  XWeight diff = lambda2 - lambda;
  auto x = solve_columns(root_.roots, diff.c);
  if (!x) return std::nullopt;
  RootWeight nu = RootWeight::zero(rank());
  for (int i = 0; i < rank(); ++i) {
    const Rational& v = (*x)[static_cast<size_t>(i)];
    if (v.get_den() != 1) return std::nullopt;
    nu.c[static_cast<size_t>(i)] = static_cast<int>(v.get_num().get_si());
  }
  return nu;
}

bool Datum::leq(const XWeight& lambda, const XWeight& lambda2, std::string* diagnostic) const {
  auto nu = root_difference(lambda, lambda2);
  if (!nu) {
    if (diagnostic)
      *diagnostic = "IndeterminateOrder: " + render_lattice(lambda2 - lambda) + " is not in the root lattice";
    return false;
  }
  return nu->nonnegative();
}

// ---------------------------------------------------------------- built-ins

namespace {

std::shared_ptr<const Datum> from_dot(const std::string& name, std::vector<std::vector<int>> dot,
                                      std::vector<int> parity) {
  SuperCartanDatum c;
  c.dot = std::move(dot);
  c.parity = std::move(parity);
  c.super = true;
  const int n = c.rank();
  RootDatum r;
  r.x_rank = n;
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(static_cast<size_t>(n), 0);
    e[static_cast<size_t>(i)] = 1;
    r.coroots.push_back(e);
  }
  // fundamental-weight coordinates: i'_k = <k, i'> = a_{k i}
  for (int i = 0; i < n; ++i) {
    std::vector<int> col;
    for (int k = 0; k < n; ++k) col.push_back(c.a(k, i));
    r.roots.push_back(col);
  }
  return std::make_shared<const Datum>(name, c, r);
}

}  // namespace

std::shared_ptr<const Datum> Datum::rank1() { return from_dot("rank1", {{2}}, {1}); }

std::shared_ptr<const Datum> Datum::b0n(int n) {
  if (n < 1 || n > 3) throw InvalidDatum("B(0,n) is built in for 1 <= n <= 3");
  if (n == 1) return from_dot("b01", {{2}}, {1});
  std::vector<std::vector<int>> dot(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 0));
  std::vector<int> parity(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    dot[static_cast<size_t>(i)][static_cast<size_t>(i)] = (i == n - 1) ? 2 : 4;
    if (i + 1 < n) dot[static_cast<size_t>(i)][static_cast<size_t>(i + 1)] = dot[static_cast<size_t>(i + 1)][static_cast<size_t>(i)] = -2;
  }
  parity[static_cast<size_t>(n - 1)] = 1;
  // present the odd root first so that B(0,2) matches the usual labelling (1 odd, 2 even)
  std::vector<size_t> order;
  order.push_back(static_cast<size_t>(n - 1));
  for (int i = n - 2; i >= 0; --i) order.push_back(static_cast<size_t>(i));
  std::vector<std::vector<int>> d2(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  std::vector<int> p2(static_cast<size_t>(n));
  for (size_t a = 0; a < order.size(); ++a) {
    p2[a] = parity[order[a]];
    for (size_t b = 0; b < order.size(); ++b) d2[a][b] = dot[order[a]][order[b]];
  }
  return from_dot("b0" + std::to_string(n), d2, p2);
}

std::shared_ptr<const Datum> Datum::km2() {
  // The Cartan matrix is singular, so X gets one extra coordinate to keep the roots independent.
  SuperCartanDatum c;
  c.dot = {{2, -2}, {-2, 2}};
  c.parity = {1, 1};
  RootDatum r;
  r.x_rank = 3;
  r.coroots = {{1, 0, 0}, {0, 1, 0}};
  r.roots = {{2, -2, 0}, {-2, 2, 1}};
  return std::make_shared<const Datum>("km2", c, r);
}

std::vector<std::string> Datum::builtin_names() { return {"rank1", "b02", "b03", "km2"}; }

std::shared_ptr<const Datum> Datum::builtin(const std::string& name) {
  if (name == "rank1" || name == "covering-sl2" || name == "b01" || name == "B(0,1)") return rank1();
  if (name == "b02" || name == "B(0,2)") return b0n(2);
  if (name == "b03" || name == "B(0,3)") return b0n(3);
  if (name == "km2") return km2();
  return nullptr;
}

// ---------------------------------------------------------------- validation

std::vector<Violation> validate_datum(const SuperCartanDatum& d, const RootDatum& r) {
  std::vector<Violation> out;
  const int n = d.rank();
  auto add = [&](const std::string& c, const std::string& m) { out.push_back({c, m}); };
  if (n == 0) {
    add("structure", "index set is empty");
    return out;
  }
  if (static_cast<int>(d.parity.size()) != n) {
    add("structure", "parity list length differs from the index set");
    return out;
  }
  for (const auto& row : d.dot)
    if (static_cast<int>(row.size()) != n) {
      add("structure", "dot matrix is not square");
      return out;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d.dot[static_cast<size_t>(i)][static_cast<size_t>(j)] != d.dot[static_cast<size_t>(j)][static_cast<size_t>(i)])
        add("symmetry", "i.j != j.i for (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  bool any_odd = false;
  for (int i = 0; i < n; ++i) {
    const int ii = d.dot[static_cast<size_t>(i)][static_cast<size_t>(i)];
    const std::string si = std::to_string(i + 1);
    if (d.p(i) != 0 && d.p(i) != 1) add("parity", "parity of " + si + " is not 0 or 1");
    if (d.p(i) == 1) any_odd = true;
    if (ii <= 0 || ii % 2 != 0) {
      add("(a)", "i.i must lie in 2Z_{>0} for i=" + si);
      continue;
    }
    if ((d.d(i) - d.p(i)) % 2 != 0)
      add("(e)", "bar-consistency: d_i = " + std::to_string(d.d(i)) + " and p(i) = " + std::to_string(d.p(i)) +
                     " differ mod 2 for i=" + si);
    for (int j = 0; j < n; ++j) {
      const int ij = d.dot[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const std::string pj = "(" + si + "," + std::to_string(j + 1) + ")";
      if (ij % 2 != 0) add("(f)", "i.j is odd for " + pj);
      if (i == j) continue;
      if ((2 * ij) % ii != 0 || ij > 0) {
        add("(b)", "a_ij is not a nonpositive integer for " + pj);
        continue;
      }
      if (d.p(i) == 1 && d.a(i, j) % 2 != 0) add("(d)", "a_ij must be even for odd i, " + pj);
    }
  }
  if (d.super && !any_odd) add("(c)", "super datum has no odd index");

  if (static_cast<int>(r.coroots.size()) != n || static_cast<int>(r.roots.size()) != n) {
    add("root datum", "number of roots/coroots differs from the index set");
    return out;
  }
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(r.coroots[static_cast<size_t>(i)].size()) != r.x_rank ||
        static_cast<int>(r.roots[static_cast<size_t>(i)].size()) != r.x_rank) {
      add("root datum", "root or coroot has the wrong length");
      return out;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int ii = d.dot[static_cast<size_t>(i)][static_cast<size_t>(i)];
      if (ii <= 0) continue;
      int pairing = Datum::pair(YCoweight(r.coroots[static_cast<size_t>(i)]), XWeight(r.roots[static_cast<size_t>(j)]));
      if (pairing * ii != 2 * d.dot[static_cast<size_t>(i)][static_cast<size_t>(j)])
        add("root datum (c)", "<i,j'> != 2 i.j / i.i for (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }
  if (integer_rank(r.roots) != n) add("X-regular", "the roots i' are linearly dependent");
  if (integer_rank(r.coroots) != n) add("Y-regular", "the coroots i are linearly dependent");
  return out;
}

std::vector<Violation> validate_params(const IParams& p, const Datum& d) {
  std::vector<Violation> out;
  const int n = d.rank();
  if (static_cast<int>(p.tau.size()) != n || static_cast<int>(p.varsigma.size()) != n) {
    out.push_back({"params", "tau and varsigma must have one entry per index"});
    return out;
  }
  for (int i = 0; i < n; ++i) {
    int t = p.tau[static_cast<size_t>(i)];
    if (t < 0 || t >= n || p.tau[static_cast<size_t>(t)] != i) {
      out.push_back({"tau", "tau is not an involution at " + std::to_string(i + 1)});
      return out;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d.dot(i, j) != d.dot(p.tau[static_cast<size_t>(i)], p.tau[static_cast<size_t>(j)]) ||
          d.p(i) != d.p(p.tau[static_cast<size_t>(i)]))
        out.push_back({"tau", "tau does not preserve the datum at (" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")"});
  for (int i = 0; i < n; ++i) {
    const QPiScalar& s = p.varsigma[static_cast<size_t>(i)];
    const int ti = p.tau[static_cast<size_t>(i)];
    const std::string si = std::to_string(i + 1);
    if (s.plus().is_zero() || s.minus().is_zero()) out.push_back({"varsigma", "varsigma_" + si + " is a zero divisor"});
    if (ti == i) {
      bool linked = false;
      for (int j = 0; j < n; ++j)
        if (j != i && d.a(i, j) != 0) linked = true;
      QPiScalar sq = s.shifted(d.d(i), 0);
      if (linked && !(sq.bar() == sq))
        out.push_back({"(bar1)", "bar(varsigma_i q_i) != varsigma_i q_i for i=" + si});
    } else {
      const QPiScalar& st = p.varsigma[static_cast<size_t>(ti)];
      if (d.a(i, ti) == 0) {
        if (!(s == st) || !(s.bar() == s))
          out.push_back({"(bar2)", "need bar(varsigma_i) = varsigma_i = varsigma_{tau i} for i=" + si});
      } else {
        QPiScalar rhs = s.bar().shifted(-d.d(i) * d.a(i, ti), d.p(i));
        if (!(st == rhs))
          out.push_back({"(bar3)", "varsigma_{tau i} != pi_i q_i^{-a_{i,tau i}} bar(varsigma_i) for i=" + si});
      }
    }
  }
  return out;
}

IParams default_params(const Datum& d) {
  IParams p;
  for (int i = 0; i < d.rank(); ++i) {
    p.tau.push_back(i);
    p.varsigma.push_back(QPiScalar::monomial(1, -d.d(i), 0));
  }
  return p;
}

IParams split_params(const Datum& d, const QPiScalar& varsigma) {
  IParams p;
  for (int i = 0; i < d.rank(); ++i) {
    p.tau.push_back(i);
    p.varsigma.push_back(varsigma);
  }
  return p;
}

YCoweight tau_on_y(const Datum& d, const IParams& p, const YCoweight& mu) {
  auto x = solve_columns(d.root().coroots, mu.c);
  if (!x) throw UnsupportedPresentation("coweight " + render_lattice(mu) + " is outside the coroot span");
  std::vector<Rational> out(static_cast<size_t>(d.x_rank()), Rational(0));
  for (int i = 0; i < d.rank(); ++i) {
    const auto& cr = d.root().coroots[static_cast<size_t>(p.tau[static_cast<size_t>(i)])];
    for (int k = 0; k < d.x_rank(); ++k) out[static_cast<size_t>(k)] += (*x)[static_cast<size_t>(i)] * cr[static_cast<size_t>(k)];
  }
  YCoweight r = YCoweight::zero(d.x_rank());
  for (int k = 0; k < d.x_rank(); ++k) {
    if (out[static_cast<size_t>(k)].get_den() != 1) throw UnsupportedPresentation("tau does not preserve Y");
    r.c[static_cast<size_t>(k)] = static_cast<int>(out[static_cast<size_t>(k)].get_num().get_si());
  }
  return r;
}

std::vector<YCoweight> iota_coweights(const Datum& d, const IParams& p) {
  std::vector<YCoweight> out;
  for (int i = 0; i < d.rank(); ++i) {
    int t = p.tau[static_cast<size_t>(i)];
    if (t > i) out.push_back(d.coroot_y(i) - d.coroot_y(t));
  }
  return out;
}

XWeight iota_class(const Datum& d, const IParams& p, const XWeight& lambda) {
  const size_t n = static_cast<size_t>(d.x_rank());
  std::vector<std::vector<long>> gens;
  for (int i = 0; i < d.rank(); ++i) {
    XWeight v = d.root_x(i) + d.root_x(p.tau[static_cast<size_t>(i)]);
    gens.emplace_back(v.c.begin(), v.c.end());
  }
  auto h = hermite_rows(gens, n);
  std::vector<long> v(lambda.c.begin(), lambda.c.end());
  for (const auto& row : h) {
    size_t col = 0;
    while (row[col] == 0) ++col;
    long piv = row[col];
    long f = v[col] >= 0 ? v[col] / piv : -((-v[col] + piv - 1) / piv);
    for (size_t k = 0; k < n; ++k) v[k] -= f * row[k];
  }
  XWeight r = XWeight::zero(d.x_rank());
  for (size_t k = 0; k < n; ++k) r.c[k] = static_cast<int>(v[k]);
  return r;
}

// ---------------------------------------------------------------- JSON

namespace {

using nlohmann::json;

std::string label_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long>());
  throw InvalidDatum("index labels must be strings or integers");
}

std::vector<std::vector<int>> int_matrix(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidDatum(std::string(what) + " must be an array of arrays");
  std::vector<std::vector<int>> out;
  for (const auto& row : j) {
    if (!row.is_array()) throw InvalidDatum(std::string(what) + " must be an array of arrays");
    std::vector<int> r;
    for (const auto& x : row) {
      if (!x.is_number_integer()) throw InvalidDatum(std::string(what) + " entries must be integers");
      r.push_back(x.get<int>());
    }
    out.push_back(r);
  }
  return out;
}

QPiScalar scalar_entry(const json& j) {
  if (j.is_string()) return parse_scalar(j.get<std::string>());
  if (j.is_number_integer()) return QPiScalar(j.get<long>());
  if (j.is_object() && j.contains("plus") && j.contains("minus")) {
    auto comp = [](const json& x) {
      return x.is_string() ? parse_scalar(x.get<std::string>()) : QPiScalar(x.get<long>());
    };
    return QPiScalar(comp(j["plus"]).plus(), comp(j["minus"]).minus());
  }
  throw InvalidDatum("varsigma entries must be strings or {\"plus\",\"minus\"} objects");
}

}  // namespace

LoadedDatum load_datum_json(const std::string& text, const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("datum descriptor is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidDatum("datum descriptor must be a JSON object");
  for (const char* key : {"I", "dot", "parity"})
    if (!j.contains(key)) throw InvalidDatum(std::string("datum descriptor lacks \"") + key + "\"");
  SuperCartanDatum c;
  for (const auto& l : j["I"]) c.labels.push_back(label_of(l));
  c.dot = int_matrix(j["dot"], "dot");
  for (const auto& x : j["parity"]) c.parity.push_back(x.get<int>());
  if (j.contains("super")) c.super = j["super"].get<bool>();
  const int n = static_cast<int>(c.labels.size());
  if (c.rank() != n || static_cast<int>(c.parity.size()) != n)
    throw InvalidDatum("\"I\", \"dot\" and \"parity\" must have matching sizes");

  RootDatum r;
  if (j.contains("pairing")) {
    r.coroots = int_matrix(j["pairing"], "pairing");
    r.x_rank = j.contains("X_rank") ? j["X_rank"].get<int>()
                                    : (r.coroots.empty() ? 0 : static_cast<int>(r.coroots[0].size()));
  } else {
    r.x_rank = n;
    for (int i = 0; i < n; ++i) {
      std::vector<int> e(static_cast<size_t>(n), 0);
      e[static_cast<size_t>(i)] = 1;
      r.coroots.push_back(e);
    }
  }
  if (j.contains("roots")) {
    r.roots = int_matrix(j["roots"], "roots");
  } else {
    if (static_cast<int>(r.coroots.size()) != n) throw InvalidDatum("pairing must have one row per index");
    // solve <k, i'> = a_{k i} for i' when the coroot matrix is square
    std::vector<std::vector<int>> cols(static_cast<size_t>(r.x_rank), std::vector<int>(static_cast<size_t>(n)));
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < r.x_rank; ++m) cols[static_cast<size_t>(m)][static_cast<size_t>(k)] = r.coroots[static_cast<size_t>(k)][static_cast<size_t>(m)];
    for (int i = 0; i < n; ++i) {
      std::vector<int> rhs;
      for (int k = 0; k < n; ++k) {
        int kk = c.dot[static_cast<size_t>(k)][static_cast<size_t>(k)];
        if (kk == 0) throw InvalidDatum("i.i must be nonzero");
        rhs.push_back(2 * c.dot[static_cast<size_t>(k)][static_cast<size_t>(i)] / kk);
      }
      auto x = solve_columns(cols, rhs);
      if (!x) throw InvalidDatum("cannot realize the roots from the pairing; supply \"roots\"");
      std::vector<int> root;
      for (const auto& v : *x) {
        if (v.get_den() != 1) throw InvalidDatum("roots are not integral in X; supply \"roots\"");
        root.push_back(static_cast<int>(v.get_num().get_si()));
      }
      r.roots.push_back(root);
    }
  }

  LoadedDatum out;
  out.datum = std::make_shared<const Datum>(name, c, r);
  out.params = default_params(*out.datum);
  if (j.contains("tau")) {
    out.params_given = true;
    std::map<std::string, int> pos;
    for (int i = 0; i < n; ++i) pos[c.labels[static_cast<size_t>(i)]] = i;
    out.params.tau.clear();
    for (const auto& t : j["tau"]) {
      auto it = pos.find(label_of(t));
      if (it == pos.end()) throw InvalidDatum("tau refers to an unknown index");
      out.params.tau.push_back(it->second);
    }
  }
  if (j.contains("varsigma")) {
    out.params_given = true;
    out.params.varsigma.clear();
    for (const auto& s : j["varsigma"]) out.params.varsigma.push_back(scalar_entry(s));
  }
  return out;
}

std::string datum_to_json(const Datum& d, const IParams& p) {
  nlohmann::ordered_json j;
  j["I"] = d.cartan().labels;
  j["dot"] = d.cartan().dot;
  j["parity"] = d.cartan().parity;
  std::vector<std::string> tau;
  for (int t : p.tau) tau.push_back(d.label(t));
  j["tau"] = tau;
  auto vs = nlohmann::ordered_json::array();
  for (const auto& s : p.varsigma)
    vs.push_back({{"plus", to_string(s.plus())}, {"minus", to_string(s.minus())}});
  j["varsigma"] = vs;
  j["X_rank"] = d.x_rank();
  j["pairing"] = d.root().coroots;
  j["roots"] = d.root().roots;
  return j.dump(2);
}

}  // namespace qcov
