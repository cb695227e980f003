#include "qcov/pbw.hpp"

#include <sstream>

namespace qcov {

namespace {

int mod2(int x) { return ((x % 2) + 2) % 2; }

std::vector<int> mod2(std::vector<int> v) {
  for (auto& x : v) x = mod2(x);
  return v;
}

std::vector<int> add_vec(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r = a;
  for (size_t k = 0; k < r.size(); ++k) r[k] += b[k];
  return r;
}

QPiScalar qpi_power(int qexp, int piexp) { return QPiScalar::monomial(1, qexp, mod2(piexp)); }

std::string scalar_factor(const QPiScalar& c) {
  std::string s = to_string(c);
  if (s.find(' ') != std::string::npos) return "(" + s + ")";
  return s;
}

}  // namespace

void PbwElement::add(const PbwKey& k, const QPiScalar& c) {
  if (c.is_zero()) return;
  auto it = terms.find(k);
  if (it == terms.end()) {
    terms.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

PbwElement& PbwElement::operator+=(const PbwElement& o) {
  for (const auto& [k, c] : o.terms) add(k, c);
  return *this;
}

PbwElement PbwElement::operator+(const PbwElement& o) const {
  PbwElement r = *this;
  r += o;
  return r;
}

PbwElement PbwElement::operator-(const PbwElement& o) const {
  PbwElement r = *this;
  for (const auto& [k, c] : o.terms) r.add(k, -c);
  return r;
}

PbwElement PbwElement::scaled(const QPiScalar& c) const {
  PbwElement r;
  if (c.is_zero()) return r;
  for (const auto& [k, v] : terms) r.add(k, v * c);
  return r;
}

void TensorElement::add(const TensorKey& k, const QPiScalar& c) {
  if (c.is_zero()) return;
  auto it = terms.find(k);
  if (it == terms.end()) {
    terms.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms.erase(it);
}

TensorElement& TensorElement::operator+=(const TensorElement& o) {
  for (const auto& [k, c] : o.terms) add(k, c);
  return *this;
}

TensorElement TensorElement::operator-(const TensorElement& o) const {
  TensorElement r = *this;
  for (const auto& [k, c] : o.terms) r.add(k, -c);
  return r;
}

TensorElement TensorElement::scaled(const QPiScalar& c) const {
  TensorElement r;
  if (c.is_zero()) return r;
  for (const auto& [k, v] : terms) r.add(k, v * c);
  return r;
}

CoveringAlgebra::CoveringAlgebra(std::shared_ptr<HalfAlgebra> half, int height_bound)
    : half_(std::move(half)), bound_(height_bound) {
  if (bound_ > half_->height_bound())
    throw TruncationOverflow("U height bound exceeds the half-algebra bound");
}

PbwKey CoveringAlgebra::unit_key() const {
  const int n = datum().rank(), x = datum().x_rank();
  PbwKey k;
  k.fwt = RootWeight::zero(n);
  k.ewt = RootWeight::zero(n);
  k.j.assign(static_cast<size_t>(x), 0);
  k.k.assign(static_cast<size_t>(x), 0);
  return k;
}

PbwElement CoveringAlgebra::one() const {
  PbwElement r;
  r.add(unit_key(), QPiScalar(1));
  return r;
}

PbwElement CoveringAlgebra::E(int i) const {
  PbwKey k = unit_key();
  k.ewt = RootWeight::simple(datum().rank(), i);
  PbwElement r;
  r.add(k, QPiScalar(1));
  return r;
}

PbwElement CoveringAlgebra::F(int i) const {
  PbwKey k = unit_key();
  k.fwt = RootWeight::simple(datum().rank(), i);
  PbwElement r;
  r.add(k, QPiScalar(1));
  return r;
}

PbwElement CoveringAlgebra::K(const YCoweight& mu) const {
  PbwKey k = unit_key();
  k.k = mu.c;
  PbwElement r;
  r.add(k, QPiScalar(1));
  return r;
}

PbwElement CoveringAlgebra::J(const YCoweight& mu) const {
  PbwKey k = unit_key();
  k.j = mod2(mu.c);
  PbwElement r;
  r.add(k, QPiScalar(1));
  return r;
}

PbwElement CoveringAlgebra::Kt(int i, int n) const { return K(datum().tilde_y(i) * n); }
PbwElement CoveringAlgebra::Jt(int i) const { return J(datum().tilde_y(i)); }

PbwElement CoveringAlgebra::plus(const HalfVec& v) const {
  if (!fits(v.nu)) overflow(v.nu);
  PbwElement r;
  for (size_t l = 0; l < v.c.size(); ++l) {
    PbwKey k = unit_key();
    k.ewt = v.nu;
    k.eidx = static_cast<int>(l);
    r.add(k, v.c[l]);
  }
  return r;
}

PbwElement CoveringAlgebra::minus(const HalfVec& v) const {
  if (!fits(v.nu)) overflow(v.nu);
  PbwElement r;
  for (size_t l = 0; l < v.c.size(); ++l) {
    PbwKey k = unit_key();
    k.fwt = v.nu;
    k.fidx = static_cast<int>(l);
    r.add(k, v.c[l]);
  }
  return r;
}

int CoveringAlgebra::parity(const PbwKey& k) const {
  return mod2(datum().parity(k.fwt) + datum().parity(k.ewt));
}

void CoveringAlgebra::overflow(const RootWeight& nu) const {
  throw TruncationOverflow("weight " + render_weight(nu) + " exceeds height bound " + std::to_string(bound_));
}

const Word& CoveringAlgebra::fword(const PbwKey& k) {
  return half_->basis(k.fwt).pivot_words[static_cast<size_t>(k.fidx)];
}

const Word& CoveringAlgebra::eword(const PbwKey& k) {
  return half_->basis(k.ewt).pivot_words[static_cast<size_t>(k.eidx)];
}

PbwElement CoveringAlgebra::lmul_E(int i, const PbwElement& x, bool drop) {
  const Datum& d = datum();
  const int n = d.rank();
  const int di = d.d(i), pi_ = d.p(i);
  const RootWeight si = RootWeight::simple(n, i);
  const std::vector<int> ti = d.tilde_y(i).c;
  // 1 / (pi_i q_i - q_i^{-1})
  const QPiScalar denom_inv =
      (QPiScalar::monomial(1, di, pi_) - QPiScalar::monomial(1, -di, 0)).inverse();
  PbwElement out;
  for (const auto& [key, c] : x.terms) {
    const Word w = fword(key);
    const int pw = d.parity(key.fwt);
    // E_i passes the F-word, then J^a K^b, then joins the E-part.
    {
      RootWeight ne = key.ewt + si;
      if (!fits(ne)) {
        if (!drop) overflow(ne);
      } else {
        const int pa = Datum::pair(YCoweight(key.j), d.root_x(i));
        const int pb = Datum::pair(YCoweight(key.k), d.root_x(i));
        QPiScalar f = c * qpi_power(-pb, pi_ * pw + pa);
        HalfVec img = half_->left_mul(i, half_->unit(key.ewt, key.eidx));
        for (size_t l = 0; l < img.c.size(); ++l) {
          if (img.c[l].is_zero()) continue;
          PbwKey nk = key;
          nk.ewt = ne;
          nk.eidx = static_cast<int>(l);
          out.add(nk, f * img.c[l]);
        }
      }
    }
    // R6 correction at each occurrence of F_i in the F-word.
    int p_prefix = 0;
    for (size_t a = 0; a < w.size(); ++a) {
      if (w[a] == i) {
        Word ps(w.begin(), w.begin() + static_cast<long>(a));
        Word suffix(w.begin() + static_cast<long>(a) + 1, w.end());
        ps.insert(ps.end(), suffix.begin(), suffix.end());
        RootWeight sw = RootWeight::zero(n);
        for (int l : suffix) sw = sw + RootWeight::simple(n, l);
        const int ds = d.dot(sw, i);
        const RootWeight nf = key.fwt - si;
        std::vector<QPiScalar> coords = half_->word_coords(ps);
        QPiScalar base = c * denom_inv * qpi_power(0, pi_ * p_prefix);
        QPiScalar fa = base * qpi_power(-ds, ds);
        QPiScalar fb = -(base * qpi_power(ds, 0));
        for (size_t l = 0; l < coords.size(); ++l) {
          if (coords[l].is_zero()) continue;
          PbwKey ka = key;
          ka.fwt = nf;
          ka.fidx = static_cast<int>(l);
          PbwKey kb = ka;
          ka.j = mod2(add_vec(key.j, ti));
          ka.k = add_vec(key.k, ti);
          for (size_t t = 0; t < ti.size(); ++t) kb.k[t] -= ti[t];
          out.add(ka, fa * coords[l]);
          out.add(kb, fb * coords[l]);
        }
      }
      p_prefix += d.p(w[a]);
    }
  }
  return out;
}

PbwElement CoveringAlgebra::lmul_F(int i, const PbwElement& x, bool drop) {
  const RootWeight si = RootWeight::simple(datum().rank(), i);
  PbwElement out;
  for (const auto& [key, c] : x.terms) {
    RootWeight nf = key.fwt + si;
    if (!fits(nf)) {
      if (!drop) overflow(nf);
      continue;
    }
    HalfVec img = half_->left_mul(i, half_->unit(key.fwt, key.fidx));
    for (size_t l = 0; l < img.c.size(); ++l) {
      if (img.c[l].is_zero()) continue;
      PbwKey nk = key;
      nk.fwt = nf;
      nk.fidx = static_cast<int>(l);
      out.add(nk, c * img.c[l]);
    }
  }
  return out;
}

PbwElement CoveringAlgebra::lmul_K(const YCoweight& mu, const PbwElement& x) const {
  PbwElement out;
  for (const auto& [key, c] : x.terms) {
    PbwKey nk = key;
    nk.k = add_vec(key.k, mu.c);
    out.add(nk, c.shifted(-Datum::pair(mu, datum().to_x(key.fwt)), 0));
  }
  return out;
}

PbwElement CoveringAlgebra::lmul_J(const YCoweight& mu, const PbwElement& x) const {
  PbwElement out;
  for (const auto& [key, c] : x.terms) {
    PbwKey nk = key;
    nk.j = mod2(add_vec(key.j, mu.c));
    out.add(nk, c.shifted(0, mod2(Datum::pair(mu, datum().to_x(key.fwt)))));
  }
  return out;
}

PbwElement CoveringAlgebra::mul_key(const PbwKey& k, const PbwElement& y, bool drop) {
  PbwElement r = y;
  const Word ew = eword(k);
  for (auto it = ew.rbegin(); it != ew.rend() && !r.is_zero(); ++it) r = lmul_E(*it, r, drop);
  r = lmul_K(YCoweight(k.k), r);
  r = lmul_J(YCoweight(k.j), r);
  const Word fw = fword(k);
  for (auto it = fw.rbegin(); it != fw.rend() && !r.is_zero(); ++it) r = lmul_F(*it, r, drop);
  return r;
}

PbwElement CoveringAlgebra::mul(const PbwElement& x, const PbwElement& y, bool drop) {
  PbwElement out;
  for (const auto& [k, c] : x.terms) out += mul_key(k, y, drop).scaled(c);
  return out;
}

PbwElement CoveringAlgebra::bar_psi(const PbwElement& x) const {
  // psi(F_x J^a K^b E_y) = F_x J^{a+b} K^{-b} E_y for pivot words x, y.
  PbwElement out;
  for (const auto& [key, c] : x.terms) {
    PbwKey nk = key;
    nk.j = mod2(add_vec(key.j, key.k));
    for (auto& v : nk.k) v = -v;
    out.add(nk, c.bar());
  }
  return out;
}

TensorElement CoveringAlgebra::tensor(const PbwElement& a, const PbwElement& b) const {
  TensorElement r;
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) r.add({ka, kb}, ca * cb);
  return r;
}

TensorElement CoveringAlgebra::tensor_mul(const TensorElement& a, const TensorElement& b, bool drop) {
  // (x (x) y)(z (x) w) = pi^{p(y)p(z)} xz (x) yw
  TensorElement out;
  std::map<std::pair<PbwKey, PbwKey>, PbwElement> cache;
  auto prod = [&](const PbwKey& u, const PbwKey& v) -> const PbwElement& {
    auto key = std::make_pair(u, v);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    PbwElement pu;
    pu.add(u, QPiScalar(1));
    PbwElement pv;
    pv.add(v, QPiScalar(1));
    return cache.emplace(key, mul(pu, pv, drop)).first->second;
  };
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) {
      const PbwElement& left = prod(ka.first, kb.first);
      if (left.is_zero()) continue;
      const PbwElement& right = prod(ka.second, kb.second);
      if (right.is_zero()) continue;
      QPiScalar c = ca * cb;
      if (parity(ka.second) && parity(kb.first)) c = c.shifted(0, 1);
      for (const auto& [l, cl] : left.terms)
        for (const auto& [r, cr] : right.terms) out.add({l, r}, c * cl * cr);
    }
  return out;
}

TensorElement CoveringAlgebra::tensor_bar(const TensorElement& x) const {
  TensorElement out;
  for (const auto& [k, c] : x.terms) {
    PbwElement a, b;
    a.add(k.first, QPiScalar(1));
    b.add(k.second, QPiScalar(1));
    TensorElement t = tensor(bar_psi(a), bar_psi(b));
    out += t.scaled(c.bar());
  }
  return out;
}

TensorElement CoveringAlgebra::coproduct(const PbwElement& x, int bound) {
  auto keep = [&](const TensorKey& k) {
    return k.first.ewt.height() <= bound && k.first.fwt.height() <= bound &&
           k.second.ewt.height() <= bound && k.second.fwt.height() <= bound;
  };
  auto delta_word = [&](const Word& w, bool is_e) {
    TensorElement r = tensor(one(), one());
    for (int i : w) {
      TensorElement g;
      if (is_e) {
        g = tensor(E(i), one());
        g += tensor(mul(Jt(i), Kt(i)), E(i));
      } else {
        g = tensor(F(i), Kt(i, -1));
        g += tensor(one(), F(i));
      }
      r = filter(tensor_mul(r, g, true), keep);
    }
    return r;
  };
  auto delta_basis = [&](const RootWeight& nu, int idx, bool is_e) -> const TensorElement& {
    auto& cache = is_e ? delta_e_ : delta_f_;
    auto key = std::make_pair(nu, idx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // the pivot word is the basis element itself
    const Word& w = half_->basis(nu).pivot_words[static_cast<size_t>(idx)];
    return cache.emplace(key, delta_word(w, is_e)).first->second;
  };
  TensorElement out;
  for (const auto& [key, c] : x.terms) {
    TensorElement t = delta_basis(key.fwt, key.fidx, false);
    PbwKey mid = unit_key();
    mid.j = key.j;
    mid.k = key.k;
    PbwElement m;
    m.add(mid, QPiScalar(1));
    t = tensor_mul(t, tensor(m, m), true);
    t = filter(tensor_mul(t, delta_basis(key.ewt, key.eidx, true), true), keep);
    out += t.scaled(c);
  }
  return out;
}

std::string CoveringAlgebra::render_key(const PbwKey& k) const {
  const Datum& d = datum();
  std::vector<std::string> parts;
  auto list = [](const std::vector<std::string>& xs) {
    std::string s = "[";
    for (size_t t = 0; t < xs.size(); ++t) s += (t ? "," : "") + xs[t];
    return s + "]";
  };
  auto word_labels = [&](const Word& w) {
    std::vector<std::string> xs;
    for (int l : w) xs.push_back(d.label(l));
    return list(xs);
  };
  auto ints = [&](const std::vector<int>& v) {
    std::vector<std::string> xs;
    for (int x : v) xs.push_back(std::to_string(x));
    return list(xs);
  };
  auto nonzero = [](const std::vector<int>& v) {
    for (int x : v)
      if (x) return true;
    return false;
  };
  if (!k.fwt.is_zero())
    parts.push_back("F" + word_labels(half_->basis(k.fwt).pivot_words[static_cast<size_t>(k.fidx)]));
  if (nonzero(k.j)) parts.push_back("J" + ints(k.j));
  if (nonzero(k.k)) parts.push_back("K" + ints(k.k));
  if (!k.ewt.is_zero())
    parts.push_back("E" + word_labels(half_->basis(k.ewt).pivot_words[static_cast<size_t>(k.eidx)]));
  if (parts.empty()) return "1";
  std::string s;
  for (size_t t = 0; t < parts.size(); ++t) s += (t ? "." : "") + parts[t];
  return s;
}

std::string CoveringAlgebra::render(const PbwElement& x) const {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : x.terms) {
    if (!first) os << " + ";
    first = false;
    std::string m = render_key(k);
    if (c.is_one()) os << m;
    else if (m == "1") os << scalar_factor(c);
    else os << scalar_factor(c) << "*" << m;
  }
  return os.str();
}

std::string CoveringAlgebra::render(const TensorElement& x) const {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : x.terms) {
    if (!first) os << " + ";
    first = false;
    std::string m = render_key(k.first) + " (x) " + render_key(k.second);
    if (c.is_one()) os << m;
    else os << scalar_factor(c) << "*" << m;
  }
  return os.str();
}

}  // namespace qcov
