#include "qcov/quasi.hpp"

#include <algorithm>

namespace qcov {

namespace {

bool pure_e(const PbwKey& k) {
  if (!k.fwt.is_zero()) return false;
  for (int x : k.j)
    if (x) return false;
  for (int x : k.k)
    if (x) return false;
  return true;
}

int tau(const IParams& p, int i) { return p.tau[static_cast<size_t>(i)]; }

QPiScalar norm_factor(const Datum& d, int i) { return QPiScalar(1) - QPiScalar::monomial(1, -2 * d.d(i), d.p(i)); }

// kappa = xi (1 - pi_i q_i^{-2})^2; for tau = id this is -(pi_i q_i - q_i^{-1}) c_i pi_i q_i^2.
QPiScalar kappa(const Datum& d, const IParams& p, int i, bool right) {
  QPiScalar n = norm_factor(d, i);
  return upsilon_xi(d, p, i, right) * n * n;
}

}  // namespace

TensorElement ThetaExpansion::total() const {
  TensorElement t;
  for (const auto& [nu, x] : parts) t += x;
  return t;
}

TensorElement ThetaIExpansion::total() const {
  TensorElement t;
  for (const auto& [mu, x] : parts) t += x;
  return t;
}

ThetaExpansion theta(CoveringAlgebra& u, int bound) {
  ThetaExpansion th;
  th.bound = bound;
  HalfAlgebra& f = u.half();
  const Datum& d = u.datum();
  for (const auto& nu : f.weights_upto(bound)) {
    WeightStats st = d.weight_stats(nu);
    QPiScalar pre = (st.pi_nu * st.q_nu).shifted(0, st.e_nu % 2);
    if (st.height % 2) pre = -pre;
    TensorElement part;
    for (int l = 0; l < f.dim(nu); ++l)
      part += u.tensor(u.minus(f.unit(nu, l)), u.plus(f.dual(nu, l)));
    th.parts.emplace(nu, part.scaled(pre));
  }
  return th;
}

QPiScalar upsilon_xi(const Datum& d, const IParams& p, int i, bool right) {
  const QPiScalar& s = p.varsigma[static_cast<size_t>(i)];
  if (tau(p, i) == i) return -(s.shifted(3 * d.d(i), 0) * norm_factor(d, i).inverse());
  QPiScalar num = right ? s.bar().shifted(d.d(i), d.p(i)) : s.shifted(d.d(i) + d.d(i) * d.a(i, tau(p, i)), 0);
  return -(num * norm_factor(d, i).inverse());
}

UpsilonFunctional::UpsilonFunctional(HalfAlgebra& f, IParams params) : f_(f), params_(std::move(params)) {
  for (int i = 0; i < f.datum().rank(); ++i) {
    xi_l_.push_back(upsilon_xi(f.datum(), params_, i, false));
    xi_r_.push_back(upsilon_xi(f.datum(), params_, i, true));
  }
}

QPiScalar UpsilonFunctional::left(const Word& w) {
  if (w.empty()) return QPiScalar(1);
  auto it = left_.find(w);
  if (it != left_.end()) return it->second;
  const int i = w.front();
  Word z(w.begin() + 1, w.end());
  QPiScalar v = xi_l_[static_cast<size_t>(i)] * left(f_.ir(tau(params_, i), z));
  left_.emplace(w, v);
  return v;
}

QPiScalar UpsilonFunctional::right(const Word& w) {
  if (w.empty()) return QPiScalar(1);
  auto it = right_.find(w);
  if (it != right_.end()) return it->second;
  const int i = w.back();
  Word z(w.begin(), w.end() - 1);
  QPiScalar v = xi_r_[static_cast<size_t>(i)] * right(f_.ri(tau(params_, i), z));
  right_.emplace(w, v);
  return v;
}

QPiScalar UpsilonFunctional::left(const FreeElement& x) {
  QPiScalar s;
  for (const auto& [w, c] : x.terms) {
    QPiScalar v = left(w);
    if (!v.is_zero()) s += c * v;
  }
  return s;
}

QPiScalar UpsilonFunctional::right(const FreeElement& x) {
  QPiScalar s;
  for (const auto& [w, c] : x.terms) {
    QPiScalar v = right(w);
    if (!v.is_zero()) s += c * v;
  }
  return s;
}

UpsilonExpansion upsilon(HalfAlgebra& f, const IParams& params, int bound, bool check) {
  const Datum& d = f.datum();
  UpsilonFunctional star(f, params);
  UpsilonExpansion ups;
  ups.bound = bound;
  ups.params = params;
  for (const auto& mu : f.weights_upto(bound)) {
    const QuotientBasis& b = f.basis(mu);
    if (check) {
      for (const auto& w : b.words)
        if (star.left(w) != star.right(w))
          throw ConsistencyFailure("left and right recursions disagree on " + render_word(d, w));
      for (const auto& r : b.radical) {
        FreeElement x;
        for (size_t k = 0; k < r.size(); ++k) x.add(b.words[k], r[k]);
        if (!star.left(x).is_zero())
          throw ConsistencyFailure("Upsilon* does not vanish on the radical at weight " + render_weight(mu));
      }
    }
    HalfVec v = f.zero(mu);
    for (int l = 0; l < b.dim(); ++l) v.c[static_cast<size_t>(l)] = star.left(f.lift(f.dual(mu, l)));
    if ((d.parity(mu) || mu.height() % 2) && !v.is_zero()) ups.odd_part_zero = false;
    ups.parts.emplace(mu, v);
  }
  if (check) {
    if (!ups.odd_part_zero) throw ConsistencyFailure("Upsilon has a nonzero odd part");
    CheckResult r = verify_recursions(f, ups);
    if (!r.ok) throw ConsistencyFailure(r.detail);
  }
  return ups;
}

QPiScalar rank1_closed(int k, const QPiScalar& c) {
  QPiScalar base = -(c * QPiScalar::monomial(1, 2, 1)) * qpi_bracket_denominator(1, 1);
  QPiScalar r(1);
  for (int t = 0; t < k; ++t) r *= base;
  return r.shifted(-k * k, 0) * qpi_odd_double_factorial(k);
}

CheckResult verify_recursions(HalfAlgebra& f, const UpsilonExpansion& ups) {
  const Datum& d = f.datum();
  CheckResult res;
  for (const auto& [mu, v] : ups.parts)
    for (int i = 0; i < d.rank(); ++i) {
      RootWeight lower = mu - RootWeight::simple(d.rank(), i);
      if (!lower.nonnegative()) continue;
      const int ti = tau(ups.params, i);
      RootWeight prev = lower - RootWeight::simple(d.rank(), ti);
      HalfVec rhs_r = f.zero(lower), rhs_l = f.zero(lower);
      if (prev.nonnegative()) {
        const HalfVec& up = ups.at(prev);
        HalfVec a = f.right_mul(up, ti), b = f.left_mul(ti, up);
        rhs_r.c = scale(kappa(d, ups.params, i, true), a.c);
        rhs_l.c = scale(kappa(d, ups.params, i, false), b.c);
      }
      if (!(f.ri(i, v) == rhs_r)) res.fail("r_i identity fails at " + render_weight(mu) + " for i=" + d.label(i));
      if (!(f.ir(i, v) == rhs_l)) res.fail("ir identity fails at " + render_weight(mu) + " for i=" + d.label(i));
    }
  return res;
}

CheckResult verify_inverse(HalfAlgebra& f, const UpsilonExpansion& ups) {
  CheckResult res;
  std::map<RootWeight, HalfVec> bars;
  for (const auto& [mu, v] : ups.parts) bars.emplace(mu, f.bar(v));
  for (const auto& [mu, v] : ups.parts) {
    HalfVec sum = f.zero(mu);
    for (const auto& [alpha, ba] : bars) {
      RootWeight beta = mu - alpha;
      if (!beta.nonnegative() || ba.is_zero()) continue;
      const HalfVec& ub = ups.at(beta);
      if (ub.is_zero()) continue;
      sum.c = add(sum.c, f.multiply(ba, ub).c);
    }
    bool ok = mu.is_zero() ? (sum.c.size() == 1 && sum.c[0].is_one()) : sum.is_zero();
    if (!ok) res.fail("bar(Upsilon) Upsilon is not 1 at weight " + render_weight(mu));
  }
  return res;
}

PbwElement upsilon_pbw(CoveringAlgebra& u, const UpsilonExpansion& ups) {
  PbwElement r;
  for (const auto& [mu, v] : ups.parts) r += u.plus(v);
  return r;
}

PbwElement upsilon_bar_pbw(CoveringAlgebra& u, const UpsilonExpansion& ups) {
  PbwElement r;
  for (const auto& [mu, v] : ups.parts) r += u.plus(u.half().bar(v));
  return r;
}

PbwElement b_generator(CoveringAlgebra& u, const IParams& p, int i) {
  PbwElement e = u.mul(u.E(tau(p, i)), u.Kt(i, -1));
  return u.F(i) + e.scaled(p.varsigma[static_cast<size_t>(i)]);
}

PbwElement psi_b_generator(CoveringAlgebra& u, const IParams& p, int i) {
  PbwElement e = u.mul(u.E(tau(p, i)), u.mul(u.Jt(i), u.Kt(i)));
  return u.F(i) + e.scaled(p.varsigma[static_cast<size_t>(i)].bar());
}

CheckResult verify_intertwiner(CoveringAlgebra& u, const UpsilonExpansion& ups, int i) {
  CheckResult res;
  const int n = ups.bound;
  PbwElement y = upsilon_pbw(u, ups);
  PbwElement lhs = u.mul(b_generator(u, ups.params, i), y, true);
  PbwElement rhs = u.mul(y, psi_b_generator(u, ups.params, i), true);
  PbwElement diff = lhs - rhs;
  for (const auto& [k, c] : diff.terms) {
    const int h = k.ewt.height();
    if (h + 1 <= n || (h == n && n % 2 == 0)) {
      res.fail("B_i Upsilon != Upsilon psi(B_i) at term " + u.render_key(k));
      break;
    }
  }
  return res;
}

CheckResult verify_theta_intertwining(CoveringAlgebra& u, const ThetaExpansion& th, const PbwElement& x) {
  CheckResult res;
  const int n = th.bound;
  TensorElement t = th.total();
  TensorElement dx = u.coproduct(x, u.height_bound());
  TensorElement dbx = u.tensor_bar(u.coproduct(u.bar_psi(x), u.height_bound()));
  TensorElement diff = u.tensor_mul(dx, t, true) - u.tensor_mul(t, dbx, true);
  for (const auto& [k, c] : diff.terms)
    if (k.second.ewt.height() <= n - 1) {
      res.fail("Delta(x) Theta != Theta Delta-bar(x) at " + u.render_key(k.first) + " (x) " + u.render_key(k.second));
      break;
    }
  return res;
}

bool theta_i_exact(const TensorKey& k, int bound) {
  const int mu = k.second.ewt.height();
  return mu <= bound && k.first.ewt.height() + mu - k.first.fwt.height() <= bound;
}

ThetaIExpansion theta_i(CoveringAlgebra& u, const UpsilonExpansion& ups, const ThetaExpansion& th) {
  const int n = std::min(ups.bound, th.bound);
  ThetaIExpansion out;
  out.bound = n;
  PbwElement y = upsilon_pbw(u, ups);
  TensorElement dy = u.coproduct(y, u.height_bound());
  TensorElement a = u.tensor_mul(dy, th.total(), true);
  a = CoveringAlgebra::filter(a, [&](const TensorKey& k) { return theta_i_exact(k, n); });
  TensorElement r = u.tensor_mul(a, u.tensor(upsilon_bar_pbw(u, ups), u.one()), true);
  for (const auto& [k, c] : r.terms) {
    if (!theta_i_exact(k, n)) continue;
    if (!pure_e(k.second)) throw ConsistencyFailure("Theta^i has a second leg outside U^+");
    auto it = out.parts.find(k.second.ewt);
    if (it == out.parts.end()) it = out.parts.emplace(k.second.ewt, TensorElement{}).first;
    it->second.add(k, c);
  }
  return out;
}

CheckResult verify_theta_i_parity(CoveringAlgebra& u, const ThetaIExpansion& ti) {
  CheckResult res;
  for (const auto& [mu, part] : ti.parts)
    for (const auto& [k, c] : part.terms)
      if (u.parity(k.first) != u.parity(k.second)) {
        res.fail("legs of different parity at " + u.render_key(k.first) + " (x) " + u.render_key(k.second));
        return res;
      }
  return res;
}

CheckResult verify_theta_i_derivation(CoveringAlgebra& u, const ThetaIExpansion& ti, const IParams& p, int i,
                                      int extra_q_shift) {
  CheckResult res;
  const Datum& d = u.datum();
  const int n = ti.bound;
  HalfAlgebra& f = u.half();
  TensorElement t = ti.total();
  TensorElement lhs;
  for (const auto& [k, c] : t.terms) {
    RootWeight lower = k.second.ewt - RootWeight::simple(d.rank(), i);
    if (!lower.nonnegative()) continue;
    HalfVec v = f.ri(i, f.unit(k.second.ewt, k.second.eidx));
    for (size_t l = 0; l < v.c.size(); ++l) {
      if (v.c[l].is_zero()) continue;
      PbwKey k2 = k.second;
      k2.ewt = lower;
      k2.eidx = static_cast<int>(l);
      lhs.add({k.first, k2}, c * v.c[l]);
    }
  }
  TensorElement factor = u.tensor(b_generator(u, p, i), u.one());
  // psi(E_i K~_i^{-1}) = E_i J~_i K~_i, so no q_i^2 arises from reordering.
  QPiScalar cbar = p.varsigma[static_cast<size_t>(i)].bar().shifted(extra_q_shift, 0);
  factor += u.tensor(u.Jt(i), u.E(i)).scaled(cbar);
  TensorElement rhs = u.tensor_mul(t, factor, true).scaled(-qpi_bracket_denominator(d.d(i), d.p(i)));
  TensorElement diff = lhs - rhs;
  for (const auto& [k, c] : diff.terms) {
    const int h2 = k.second.ewt.height();
    if (h2 + 1 > n || k.first.ewt.height() + h2 + 1 - k.first.fwt.height() > n) continue;
    res.fail("derivation identity fails at " + u.render_key(k.first) + " (x) " + u.render_key(k.second));
    break;
  }
  return res;
}

namespace {

std::vector<QPiScalar> divided_monomial(HalfAlgebra& f, const Word& w) {
  QPiScalar denom(1);
  for (size_t s = 0; s < w.size();) {
    size_t t = s;
    while (t < w.size() && w[t] == w[s]) ++t;
    denom *= qpi_factorial(static_cast<int>(t - s), f.datum().d(w[s]));
    s = t;
  }
  return scale(denom.inverse(), f.word_coords(w));
}

int runs(const Word& w) {
  int r = 0;
  for (size_t s = 0; s < w.size(); ++s)
    if (s == 0 || w[s] != w[s - 1]) ++r;
  return r;
}

// Tries bases of divided-power monomials; true once one gives integral coordinates.
bool integral_in_some_basis(HalfAlgebra& f, const RootWeight& mu, const HalfVec& v) {
  const QuotientBasis& b = f.basis(mu);
  const int dim = b.dim();
  std::vector<Word> words = b.words;
  std::stable_sort(words.begin(), words.end(), [](const Word& x, const Word& y) { return runs(x) < runs(y); });
  std::vector<std::vector<QPiScalar>> cand;
  for (const auto& w : words) cand.push_back(divided_monomial(f, w));
  const int n = static_cast<int>(cand.size());
  std::vector<int> pick(static_cast<size_t>(dim));
  for (int k = 0; k < dim; ++k) pick[static_cast<size_t>(k)] = k;
  int budget = 4000;
  while (budget-- > 0) {
    Matrix m(dim, dim);
    for (int c = 0; c < dim; ++c) m.set_column(c, cand[static_cast<size_t>(pick[static_cast<size_t>(c)])]);
    try {
      std::vector<QPiScalar> x = inverse(m) * v.c;
      bool ok = true;
      for (const auto& s : x) ok = ok && s.in_integral_form();
      if (ok) return true;
    } catch (const NonInvertible&) {
    }
    // next combination in lexicographic order
    int k = dim - 1;
    while (k >= 0 && pick[static_cast<size_t>(k)] == n - dim + k) --k;
    if (k < 0) break;
    ++pick[static_cast<size_t>(k)];
    for (int t = k + 1; t < dim; ++t) pick[static_cast<size_t>(t)] = pick[static_cast<size_t>(t - 1)] + 1;
  }
  return false;
}

}  // namespace

std::vector<IntegralityEntry> integrality_report(HalfAlgebra& f, const UpsilonExpansion& ups) {
  const Datum& d = f.datum();
  std::vector<IntegralityEntry> out;
  for (const auto& [mu, v] : ups.parts) {
    IntegralityEntry e;
    e.mu = mu;
    e.method = d.rank() == 1 ? "E^(n) coefficient" : "divided-power monomial basis";
    e.integral = v.is_zero() || integral_in_some_basis(f, mu, v);
    out.push_back(e);
  }
  return out;
}

}  // namespace qcov
