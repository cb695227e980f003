#include <gtest/gtest.h>

#include "qcov/modules.hpp"

using namespace qcov;

namespace {

struct Env {
  std::shared_ptr<const Datum> d;
  std::shared_ptr<HalfAlgebra> f;
  std::unique_ptr<CoveringAlgebra> u;
  Env(const std::string& name, int n)
      : d(Datum::builtin(name)), f(std::make_shared<HalfAlgebra>(d, n)),
        u(std::make_unique<CoveringAlgebra>(f, n)) {}
};

Vec unit(int n, int k) {
  Vec v(static_cast<size_t>(n));
  v[static_cast<size_t>(k)] = QPiScalar(1);
  return v;
}

// A weight lambda with <i, lambda> = want[i], searched in a small box.
XWeight weight_with(const Datum& d, const std::vector<int>& want) {
  const int n = d.x_rank();
  std::vector<int> c(static_cast<size_t>(n), -3);
  while (true) {
    XWeight l(c);
    bool ok = true;
    for (int i = 0; i < d.rank(); ++i) ok = ok && d.pair(i, l) == want[static_cast<size_t>(i)];
    if (ok) return l;
    int k = 0;
    while (k < n && ++c[static_cast<size_t>(k)] > 3) c[static_cast<size_t>(k++)] = -3;
    if (k == n) break;
  }
  throw std::runtime_error("no weight found");
}

// Classical quantum sl2 (pi = 1), written independently of the library.
RatFunc cint(int n) {
  RatFunc r;
  for (int t = 0; t < n; ++t) r += RatFunc::q_power(n - 1 - 2 * t);
  return r;
}

RatFunc cfact(int n) {
  RatFunc r(1);
  for (int t = 1; t <= n; ++t) r *= cint(t);
  return r;
}

using CMat = std::vector<std::vector<RatFunc>>;

CMat czero(int n) { return CMat(static_cast<size_t>(n), std::vector<RatFunc>(static_cast<size_t>(n))); }

CMat cmul(const CMat& a, const CMat& b) {
  const size_t n = a.size();
  CMat r = czero(static_cast<int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      if (!a[i][k].is_zero())
        for (size_t j = 0; j < n; ++j)
          if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
  return r;
}

CMat ckron(const CMat& a, const CMat& b) {
  const size_t na = a.size(), nb = b.size();
  CMat r = czero(static_cast<int>(na * nb));
  for (size_t i = 0; i < na; ++i)
    for (size_t j = 0; j < na; ++j)
      for (size_t k = 0; k < nb; ++k)
        for (size_t l = 0; l < nb; ++l)
          if (!a[i][j].is_zero() && !b[k][l].is_zero()) r[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
  return r;
}

// F^(k) and E^(k) on L(n) in the basis F^(j) eta.
CMat cdiv_f(int n, int k) {
  CMat r = czero(n + 1);
  for (int j = 0; j + k <= n; ++j) {
    RatFunc c(1);
    for (int t = 1; t <= k; ++t) c *= cint(j + t);
    r[static_cast<size_t>(j + k)][static_cast<size_t>(j)] = c * cfact(k).inverse();
  }
  return r;
}

CMat cdiv_e(int n, int k) {
  CMat r = czero(n + 1);
  for (int j = k; j <= n; ++j) {
    RatFunc c(1);
    for (int t = 0; t < k; ++t) c *= cint(n - j + 1 + t);
    r[static_cast<size_t>(j - k)][static_cast<size_t>(j)] = c * cfact(k).inverse();
  }
  return r;
}

// Theta = sum_k (-1)^k q^{-k(k-1)/2} (q - q^-1)^k [k]! F^(k) (x) E^(k) on L(m) (x) L(n).
CMat ctheta(int m, int n) {
  CMat r = czero((m + 1) * (n + 1));
  for (int k = 0; k <= std::min(m, n); ++k) {
    RatFunc c = RatFunc::q_power(-k * (k - 1) / 2) * cfact(k);
    for (int t = 0; t < k; ++t) c *= RatFunc(-1) * (RatFunc::q_power(1) - RatFunc::q_power(-1));
    CMat t = ckron(cdiv_f(m, k), cdiv_e(n, k));
    for (auto& row : t)
      for (auto& x : row) x *= c;
    for (size_t i = 0; i < r.size(); ++i)
      for (size_t j = 0; j < r.size(); ++j) r[i][j] += t[i][j];
  }
  return r;
}

AntiLinear as_antilinear(const CMat& c) {
  Matrix m(static_cast<int>(c.size()), static_cast<int>(c.size()));
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = QPiScalar(c[i][j], c[i][j]);
  return {m};
}

RMatrix part(const Matrix& m, int sign) { return m.component(sign); }

}  // namespace

TEST(Modules, VermaRelations) {
  Env e("rank1", 4);
  for (int l = -2; l <= 3; ++l) {
    WeightModule v = verma(*e.u, XWeight({l}), 4);
    EXPECT_EQ(v.dim(), 5);
    CheckResult r = audit_relations(*e.u, v, 4);
    EXPECT_TRUE(r.ok) << r.detail;
    // E F eta = [lambda]_pi eta
    Vec x = v.E[0] * (v.F[0] * unit(v.dim(), 0));
    EXPECT_EQ(x[0], qpi_integer(l, 1)) << l;
  }
  Env b("b02", 3);
  WeightModule vb = verma(*b.u, weight_with(*b.d, {1, 2}), 3);
  CheckResult r = audit_relations(*b.u, vb, 3);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Modules, SimpleModules) {
  Env e("rank1", 7);
  for (int n = 0; n <= 6; ++n) {
    WeightModule l = simple(*e.u, XWeight({n}), n + 1);
    EXPECT_EQ(l.dim(), n + 1);
    CheckResult r = audit_relations(*e.u, l);
    EXPECT_TRUE(r.ok) << r.detail;
  }
  EXPECT_THROW(simple(*e.u, XWeight({-1}), 3), NotDominant);
  EXPECT_THROW(simple(*e.u, XWeight({4}), 3), DepthExceeded);
  Env b("b02", 5);
  for (const auto& top : std::vector<std::vector<int>>{{1, 0}, {0, 1}}) {
    WeightModule l = simple(*b.u, weight_with(*b.d, top), 5);
    CheckResult r = audit_relations(*b.u, l);
    EXPECT_TRUE(r.ok) << r.detail;
    EXPECT_GT(l.dim(), 1);
  }
}

TEST(Modules, CanonicalBasisOfSimple) {
  Env e("rank1", 5);
  for (int n = 0; n <= 4; ++n) {
    BasedModule l = canonical_basis_rank1(*e.u, n);
    EXPECT_TRUE(l.psi.m.is_identity());
    EXPECT_TRUE(audit_relations(*e.u, l.mod).ok);
    require_integral(l.mod.E[0], "E");
    require_integral(l.mod.F[0], "F");
  }
}

TEST(Modules, TensorPsiIsInvolutionFixingTop) {
  Env e("rank1", 4);
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n) {
      TensorModule t = tensor(*e.u, canonical_basis_rank1(*e.u, m), canonical_basis_rank1(*e.u, n));
      EXPECT_TRUE(t.psi_pairs.involutive());
      Vec top = unit(t.pairs.dim(), t.pairs.highest);
      EXPECT_EQ(t.psi_pairs(top), top);
      EXPECT_TRUE(audit_relations(*e.u, t.diamond.mod).ok);
      EXPECT_TRUE(audit_relations(*e.u, t.pairs).ok);
    }
}

TEST(Modules, DiamondMatchesDenseOracle) {
  Env e("rank1", 4);
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 3; ++n) {
      BasedModule a = canonical_basis_rank1(*e.u, m), b = canonical_basis_rank1(*e.u, n);
      TensorModule t = tensor(*e.u, a, b);
      for (int sign : {1, -1})
        EXPECT_EQ(part(t.change, sign), dense_fixed_basis(t.psi_pairs, sign, order_pairs(a.mod, b.mod), (m + 1) * (n + 1)))
            << m << "," << n << " sign " << sign;
      for (int c = 0; c < t.change.cols(); ++c)
        for (int r = 0; r < t.change.rows(); ++r)
          if (r != c && !t.change(r, c).is_zero()) EXPECT_TRUE(in_strict_negative(t.change(r, c)));
    }
}

TEST(Modules, DiamondAtPiOneIsClassical) {
  Env e("rank1", 4);
  ASSERT_EQ(e.d->d(0), 1);
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 3; ++n) {
      BasedModule a = canonical_basis_rank1(*e.u, m), b = canonical_basis_rank1(*e.u, n);
      TensorModule t = tensor(*e.u, a, b);
      AntiLinear classical = as_antilinear(ctheta(m, n));
      EXPECT_EQ(part(t.psi_pairs.m, 1), part(classical.m, 1)) << m << "," << n;
      EXPECT_EQ(part(t.change, 1), dense_fixed_basis(classical, 1, order_pairs(a.mod, b.mod), (m + 1) * (n + 1)));
    }
}

TEST(Modules, TieBreakAgrees) {
  Env e("rank1", 4);
  BasedModule a = canonical_basis_rank1(*e.u, 3), b = canonical_basis_rank1(*e.u, 2);
  TensorModule t = tensor(*e.u, a, b);
  EXPECT_EQ(bar_invariant_basis(t.psi_pairs, order_pairs(a.mod, b.mod), true), t.change);
}

TEST(Modules, SolverRejectsBadInput) {
  Matrix m = Matrix::identity(2);
  m(1, 0) = QPiScalar::q();
  BasisOrder none = [](int, int) { return false; };
  EXPECT_THROW(bar_invariant_basis({m}, none), TriangularityFailure);
  Matrix h = Matrix::identity(2);
  h(0, 1) = QPiScalar(Rational(1, 2));
  BasisOrder below = [](int a, int b) { return a < b; };
  EXPECT_THROW(bar_invariant_basis({h}, below), LatticeNotPreserved);
}

TEST(Modules, PsiIOnSimple) {
  Env e("rank1", 5);
  IParams p = default_params(*e.d);
  UpsilonExpansion ups = upsilon(*e.f, p, 5);
  for (int n = 0; n <= 4; ++n) {
    BasedModule l = canonical_basis_rank1(*e.u, n);
    AntiLinear psi = psi_i_module(*e.u, ups, l);
    EXPECT_TRUE(psi.involutive()) << n;
    CheckResult r = verify_psi_i_intertwines(*e.u, p, l.mod, psi);
    EXPECT_TRUE(r.ok) << n << ": " << r.detail;
    require_integral(psi.m, "psi_i");
  }
  UpsilonExpansion short_ups = upsilon(*e.f, p, 2);
  EXPECT_THROW(psi_i_module(*e.u, short_ups, canonical_basis_rank1(*e.u, 4)), DepthExceeded);
}

TEST(Modules, PsiINeedsValidUpsilon) {
  Env e("rank1", 5);
  IParams p = default_params(*e.d);
  UpsilonExpansion ups = upsilon(*e.f, p, 4);
  for (auto& x : ups.parts.at(RootWeight({2})).c) x *= QPiScalar(Rational(1, 2));
  AntiLinear psi = psi_i_module(*e.u, ups, canonical_basis_rank1(*e.u, 3));
  // Only the Upsilon_2 + bar(Upsilon_2) = 0 relation sees degree 2, so psi_i stays involutive.
  EXPECT_TRUE(psi.involutive());
  EXPECT_THROW(require_integral(psi.m, "psi_i"), LatticeNotPreserved);
}

TEST(Modules, ICanonicalBasisOfSimple) {
  Env e("rank1", 7);
  IParams p = default_params(*e.d);
  UpsilonExpansion ups = upsilon(*e.f, p, 6);
  for (int n = 0; n <= 6; ++n) {
    BasedModule l = canonical_basis_rank1(*e.u, n);
    ICanonicalBasis icb = icanonical_basis(l.mod, psi_i_module(*e.u, ups, l));
    for (int c = 0; c < l.mod.dim(); ++c) {
      Vec col = icb.change.column(c);
      EXPECT_EQ(icb.psi_i(col), col);
      for (int r = 0; r < l.mod.dim(); ++r)
        if (r != c && !col[static_cast<size_t>(r)].is_zero()) EXPECT_TRUE(in_strict_negative(col[static_cast<size_t>(r)]));
    }
    for (int sign : {1, -1})
      EXPECT_EQ(part(icb.change, sign), dense_fixed_basis(icb.psi_i, sign, icb.order, (n + 1) * (n + 1))) << n;
  }
}

TEST(Modules, ICanonicalBasisOfTensor) {
  Env e("rank1", 7);
  IParams p = default_params(*e.d);
  UpsilonExpansion ups = upsilon(*e.f, p, 6);
  ThetaIExpansion ti = theta_i(*e.u, ups, theta(*e.u, 6));
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n) {
      BasedModule a = canonical_basis_rank1(*e.u, m), b = canonical_basis_rank1(*e.u, n);
      TensorModule t = tensor(*e.u, a, b);
      AntiLinear via_theta = psi_i_tensor(*e.u, ups, ti, a, b, t);
      AntiLinear via_upsilon = psi_i_module(*e.u, ups, t.diamond);
      EXPECT_EQ(via_theta.m, via_upsilon.m) << m << "," << n;
      EXPECT_TRUE(verify_psi_i_intertwines(*e.u, p, t.diamond.mod, via_upsilon).ok);
      ICanonicalBasis icb = icanonical_basis(t.diamond.mod, via_upsilon);
      for (int sign : {1, -1})
        EXPECT_EQ(part(icb.change, sign), dense_fixed_basis(icb.psi_i, sign, icb.order, (m + 1) * (n + 1))) << m << "," << n;
    }
}

TEST(Modules, IntertwiningOnRank2) {
  Env e("b02", 4);
  IParams p = default_params(*e.d);
  UpsilonExpansion ups = upsilon(*e.f, p, 4);
  WeightModule l = simple(*e.u, weight_with(*e.d, {1, 0}), 4);
  BasedModule bm{l, {Matrix::identity(l.dim())}};
  AntiLinear psi = psi_i_module(*e.u, ups, bm);
  EXPECT_TRUE(psi.involutive());
  CheckResult r = verify_psi_i_intertwines(*e.u, p, l, psi);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Modules, ChiSendsCanonicalToDiamond) {
  Env e("rank1", 4);
  for (const auto& ls : std::vector<std::vector<int>>{{1}, {1, 1}, {2, 1}, {1, 2}, {1, 1, 1}, {2, 0, 1}}) {
    std::string why;
    EXPECT_TRUE(chi_check(*e.u, ls, &why)) << why;
  }
}

TEST(Modules, SubmoduleSpannedByDiamond) {
  Env e("rank1", 4);
  for (int l = 0; l <= 3; ++l)
    for (int m = 0; m <= 3; ++m) {
      std::string why;
      EXPECT_TRUE(submodule_check(*e.u, l, m, &why)) << l << "," << m << ": " << why;
    }
}

TEST(Modules, Stabilization) {
  Env e("rank1", 9);
  IParams p = default_params(*e.d);
  UpsilonExpansion ups = upsilon(*e.f, p, 8);
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b) {
      StabilizationReport rep = stabilization(*e.u, ups, a, b, 1, 1, 4);
      EXPECT_TRUE(rep.projection_linear);
      EXPECT_TRUE(rep.stable_from.has_value()) << a << "," << b;
      for (const auto& st : rep.steps)
        if (!st.coefficients.empty()) EXPECT_TRUE(st.psi_i_invariant);
    }
}

TEST(Modules, RankChecks) {
  Env e("b02", 2);
  EXPECT_THROW(canonical_basis_rank1(*e.u, 1), RankUnsupported);
  EXPECT_THROW(chi_check(*e.u, {1}), RankUnsupported);
}

TEST(Modules, StabilizationExamples) {
  Env e("rank1", 8);
  IParams p = default_params(*e.d);
  UpsilonExpansion ups = upsilon(*e.f, p, 7);
  StabilizationReport top = stabilization(*e.u, ups, 0, 0, 2, 0, 3);
  ASSERT_TRUE(top.stable_from.has_value());
  EXPECT_EQ(*top.stable_from, 0);
  // b1 = F^(1) on the lowest-weight leg, b2 = eta, lambda + mu even
  StabilizationReport r = stabilization(*e.u, ups, 1, 0, 1, 1, 3);
  EXPECT_TRUE(r.projection_linear);
  ASSERT_TRUE(r.stable_from.has_value());
  EXPECT_LE(*r.stable_from, 1);
}

TEST(Modules, DividedPowerLeadingTermOnSimple) {
  Env e("rank1", 7);
  IParams p = default_params(*e.d);
  for (int n = 0; n <= 6; ++n) {
    BasedModule l = canonical_basis_rank1(*e.u, n);
    for (int m = 0; m <= 6; ++m)
      for (int k = 0; k <= n; ++k) {
        IParity tag = parity_tag(*e.d, 0, XWeight({n - 2 * k}));
        Matrix b = act(*e.u, idivided_power(*e.u, p, 0, m, tag).value, l.mod);
        Vec col = b * unit(l.mod.dim(), k);
        for (const auto& x : col) EXPECT_TRUE(x.in_integral_form()) << n << " " << m << " " << k;
        if (k + m <= n) {
          Vec lead = act(*e.u, e.u->minus(e.f->unit(RootWeight({m}), 0)), l.mod) * unit(l.mod.dim(), k);
          QPiScalar f_div = lead[static_cast<size_t>(k + m)] * qpi_factorial(m).inverse();
          EXPECT_EQ(col[static_cast<size_t>(k + m)], f_div) << n << " " << m << " " << k;
        }
      }
  }
}
