#include "qcov/iqsp.hpp"

#include <sstream>

namespace qcov {

IExpr IExpr::scalar(const QPiScalar& c) {
  IExpr r;
  r.add({}, c);
  return r;
}

IExpr IExpr::gen(const IGen& g) {
  IExpr r;
  r.add({g}, QPiScalar(1));
  return r;
}

void IExpr::add(const std::vector<IGen>& w, const QPiScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms.emplace(w, c);
  if (fresh) return;
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

IExpr IExpr::operator+(const IExpr& o) const {
  IExpr r = *this;
  for (const auto& [w, c] : o.terms) r.add(w, c);
  return r;
}

IExpr IExpr::operator-(const IExpr& o) const { return *this + o.scaled(QPiScalar(-1)); }

IExpr IExpr::operator*(const IExpr& o) const {
  IExpr r;
  for (const auto& [w1, c1] : terms)
    for (const auto& [w2, c2] : o.terms) {
      std::vector<IGen> w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      r.add(w, c1 * c2);
    }
  return r;
}

IExpr IExpr::scaled(const QPiScalar& c) const {
  IExpr r;
  for (const auto& [w, x] : terms) r.add(w, x * c);
  return r;
}

IExpr psi_i(const IExpr& x) {
  IExpr r;
  for (const auto& [w, c] : x.terms) {
    IExpr t = IExpr::scalar(c.bar());
    for (const auto& g : w) {
      if (g.kind == IGen::K) {
        t = t * IExpr::gen({IGen::J, 0, g.mu}) * IExpr::k(-g.mu);
      } else {
        t = t * IExpr::gen(g);
      }
    }
    r = r + t;
  }
  return r;
}

void psi_i(const PbwElement&) {
  throw UnsupportedPresentation("psi_i needs an element written in the generators of U^i, not a PBW expansion");
}

PbwElement evaluate(CoveringAlgebra& u, const IParams& p, const IExpr& x) {
  PbwElement r;
  for (const auto& [w, c] : x.terms) {
    PbwElement t = u.one();
    for (const auto& g : w) {
      switch (g.kind) {
        case IGen::B: t = u.mul(t, embed_b(u, p, g.i)); break;
        case IGen::Jt: t = u.mul(t, u.Jt(g.i)); break;
        case IGen::K: t = u.mul(t, u.K(g.mu)); break;
        case IGen::J: t = u.mul(t, u.J(g.mu)); break;
      }
    }
    r += t.scaled(c);
  }
  return r;
}

std::string render(const Datum& d, const IExpr& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : x.terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(c) << ")";
    for (const auto& g : w) {
      switch (g.kind) {
        case IGen::B: os << "*B" << d.label(g.i); break;
        case IGen::Jt: os << "*Jt" << d.label(g.i); break;
        case IGen::K: os << "*K" << render_lattice(g.mu); break;
        case IGen::J: os << "*J" << render_lattice(g.mu); break;
      }
    }
  }
  return os.str();
}

BPoly BPoly::constant(const QPiScalar& c, int jpow) {
  BPoly r;
  if (!c.is_zero()) r.coeff.emplace(std::make_pair(0, jpow % 2), c);
  return r;
}

BPoly BPoly::var() {
  BPoly r;
  r.coeff.emplace(std::make_pair(1, 0), QPiScalar(1));
  return r;
}

int BPoly::degree() const { return coeff.empty() ? -1 : coeff.rbegin()->first.first; }

std::pair<QPiScalar, QPiScalar> BPoly::at(int n) const {
  auto get = [&](int e) {
    auto it = coeff.find({n, e});
    return it == coeff.end() ? QPiScalar() : it->second;
  };
  return {get(0), get(1)};
}

namespace {

void add_to(BPoly& p, std::pair<int, int> k, const QPiScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = p.coeff.emplace(k, c);
  if (fresh) return;
  it->second += c;
  if (it->second.is_zero()) p.coeff.erase(it);
}

}  // namespace

BPoly BPoly::operator+(const BPoly& o) const {
  BPoly r = *this;
  for (const auto& [k, c] : o.coeff) add_to(r, k, c);
  return r;
}

BPoly BPoly::operator-(const BPoly& o) const { return *this + o.scaled(QPiScalar(-1)); }

BPoly BPoly::operator*(const BPoly& o) const {
  BPoly r;
  for (const auto& [k1, c1] : coeff)
    for (const auto& [k2, c2] : o.coeff) add_to(r, {k1.first + k2.first, (k1.second + k2.second) % 2}, c1 * c2);
  return r;
}

BPoly BPoly::scaled(const QPiScalar& c) const {
  BPoly r;
  for (const auto& [k, x] : coeff) add_to(r, k, x * c);
  return r;
}

BPoly BPoly::bar() const {
  BPoly r;
  for (const auto& [k, x] : coeff) add_to(r, k, x.bar());
  return r;
}

IExpr BPoly::to_expr(int i) const {
  IExpr r;
  for (const auto& [k, c] : coeff) {
    std::vector<IGen> w(static_cast<size_t>(k.first), IGen{IGen::B, i, {}});
    if (k.second) w.push_back({IGen::Jt, i, {}});
    r.add(w, c);
  }
  return r;
}

std::string BPoly::render() const {
  if (coeff.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    const auto [n, e] = it->first;
    os << "(" << to_string(it->second) << ")";
    if (n == 1) os << "*B";
    if (n > 1) os << "*B^" << n;
    if (e) os << "*J";
  }
  return os.str();
}

BPoly idivided_poly(const Datum& d, const IParams& p, int i, int m, IParity parity) {
  const int di = d.d(i);
  BPoly b = BPoly::var();
  BPoly r = BPoly::constant(QPiScalar(1));
  if (p.tau[static_cast<size_t>(i)] != i) {
    for (int t = 0; t < m; ++t) r = r * b;
    return r.scaled(qpi_factorial(m, di).inverse());
  }
  const QPiScalar& s = p.varsigma[static_cast<size_t>(i)];
  const int k = m / 2;
  if (m % 2) r = b;
  for (int j = 1; j <= k; ++j) {
    int n;
    QPiScalar c;
    if (parity == IParity::Odd) {
      n = 2 * j - 1;
      c = s.shifted(di, d.p(i));
    } else {
      n = m % 2 ? 2 * j : 2 * j - 2;
      c = s.shifted(di, 0);
    }
    QPiScalar br = qpi_integer(n, di);
    r = r * (b * b - BPoly::constant(c * br * br, 1));
  }
  return r.scaled(qpi_factorial(m, di).inverse());
}

std::string idivided_symbolic(const IParams& p, int i, int m, IParity parity) {
  std::ostringstream os;
  if (m == 0) return "1";
  if (p.tau[static_cast<size_t>(i)] != i) {
    os << (m == 1 ? std::string("B") : "B^" + std::to_string(m));
  } else {
    const int k = m / 2;
    if (m % 2) os << "B";
    for (int j = 1; j <= k; ++j) {
      if (parity == IParity::Odd) {
        os << "(B^2 - s*p*q*[" << 2 * j - 1 << "]^2*J)";
      } else {
        int n = m % 2 ? 2 * j : 2 * j - 2;
        if (n == 0) {
          os << "B^2";
        } else {
          os << "(B^2 - s*q*[" << n << "]^2*J)";
        }
      }
    }
  }
  if (m >= 2) os << "/[" << m << "]!";
  return os.str();
}

IDividedPower idivided_power(CoveringAlgebra& u, const IParams& p, int i, int m, IParity parity) {
  IDividedPower r;
  r.i = i;
  r.m = m;
  r.parity = parity;
  r.poly = idivided_poly(u.datum(), p, i, m, parity);
  r.symbolic = idivided_symbolic(p, i, m, parity);
  PbwElement b = embed_b(u, p, i);
  PbwElement jt = u.Jt(i);
  PbwElement pw = u.one();
  for (int n = 0; n <= r.poly.degree(); ++n) {
    if (n > 0) pw = u.mul(pw, b);
    auto [c0, c1] = r.poly.at(n);
    if (!c0.is_zero()) r.value += pw.scaled(c0);
    if (!c1.is_zero()) r.value += u.mul(pw, jt).scaled(c1);
  }
  return r;
}

IParity parity_tag(const Datum& d, int i, const XWeight& lambda) {
  int v = d.pair(i, lambda) % 2;
  return v ? IParity::Odd : IParity::Even;
}

PbwElement at_weight(CoveringAlgebra& u, const PbwElement& x, const XWeight& lambda) {
  const Datum& d = u.datum();
  PbwElement r;
  for (const auto& [key, c] : x.terms) {
    XWeight wt = lambda + d.to_x(key.ewt);
    const int pe = Datum::pair(YCoweight(key.j), wt);
    const int qe = Datum::pair(YCoweight(key.k), wt);
    PbwKey k = key;
    std::fill(k.j.begin(), k.j.end(), 0);
    std::fill(k.k.begin(), k.k.end(), 0);
    r.add(k, c.shifted(qe, ((pe % 2) + 2) % 2));
  }
  return r;
}

}  // namespace qcov
