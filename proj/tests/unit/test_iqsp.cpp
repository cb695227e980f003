#include <gtest/gtest.h>

#include "qcov/iqsp.hpp"

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

// Classical [n] at q^d, built from monomials.
QPiScalar classical_int(int n, int d) {
  QPiScalar r;
  for (int t = 0; t < n; ++t) r += QPiScalar::monomial(1, d * (n - 1 - 2 * t), 0);
  return r;
}

// Specialize pi -> 1 and J~ -> 1.
std::vector<RatFunc> classical(const BPoly& p) {
  std::vector<RatFunc> r(static_cast<size_t>(p.degree() + 1));
  for (const auto& [k, c] : p.coeff) r[static_cast<size_t>(k.first)] += c.specialize(1);
  return r;
}

const IParity kParities[] = {IParity::Even, IParity::Odd};

}  // namespace

TEST(Iqsp, EmbedB) {
  Env e("rank1", 2);
  auto& u = *e.u;
  IParams one = split_params(*e.d, QPiScalar(1));
  EXPECT_EQ(embed_b(u, one, 0), u.F(0) + u.mul(u.E(0), u.Kt(0, -1)));
  EXPECT_EQ(u.render(embed_b(u, one, 0)), "q^2*K[-1].E[1] + F[1]");
  IParams p = default_params(*e.d);
  EXPECT_EQ(u.bar_psi(embed_b(u, p, 0)), psi_b_generator(u, p, 0));
  EXPECT_EQ(psi_b_generator(u, p, 0), u.F(0) + u.mul(u.E(0), u.mul(u.Jt(0), u.Kt(0))).scaled(p.varsigma[0].bar()));
}

TEST(Iqsp, BWeightInQuotient) {
  auto d = Datum::km2();
  IParams p = default_params(*d);
  p.tau = {1, 0};
  for (int i = 0; i < 2; ++i) {
    XWeight f_part = -d->root_x(i);
    XWeight e_part = d->root_x(p.tau[static_cast<size_t>(i)]);
    EXPECT_EQ(iota_class(*d, p, f_part), iota_class(*d, p, e_part));
  }
}

TEST(Iqsp, DividedPowerExamples) {
  Env e("rank1", 2);
  auto& u = *e.u;
  IParams p = default_params(*e.d);
  const QPiScalar& s = p.varsigma[0];
  for (IParity par : kParities) {
    IDividedPower b1 = idivided_power(u, p, 0, 1, par);
    EXPECT_EQ(b1.poly, BPoly::var());
    EXPECT_EQ(b1.value, embed_b(u, p, 0));
    EXPECT_EQ(b1.symbolic, "B");
  }
  QPiScalar inv2 = qpi_factorial(2).inverse();
  IDividedPower ev = idivided_power(u, p, 0, 2, IParity::Even);
  EXPECT_EQ(ev.poly, (BPoly::var() * BPoly::var()).scaled(inv2));
  EXPECT_EQ(ev.symbolic, "B^2/[2]!");
  IDividedPower od = idivided_power(u, p, 0, 2, IParity::Odd);
  BPoly want = BPoly::var() * BPoly::var() - BPoly::constant(s * QPiScalar::monomial(1, 1, 1), 1);
  EXPECT_EQ(od.poly, want.scaled(inv2));
  EXPECT_EQ(od.symbolic, "(B^2 - s*p*q*[1]^2*J)/[2]!");
  EXPECT_EQ(idivided_symbolic(p, 0, 5, IParity::Even), "B(B^2 - s*q*[2]^2*J)(B^2 - s*q*[4]^2*J)/[5]!");
}

TEST(Iqsp, DegreeLeadingAndValue) {
  Env e("rank1", 6);
  auto& u = *e.u;
  IParams p = default_params(*e.d);
  for (IParity par : kParities)
    for (int m = 0; m <= 6; ++m) {
      IDividedPower x = idivided_power(u, p, 0, m, par);
      EXPECT_EQ(x.poly.degree(), m);
      EXPECT_EQ(x.poly.at(m).first, qpi_factorial(m).inverse());
      EXPECT_TRUE(x.poly.at(m).second.is_zero());
      EXPECT_EQ(evaluate(u, p, x.poly.to_expr(0)), x.value) << m;
    }
}

TEST(Iqsp, NonFixedNodeFallsBack) {
  auto d = Datum::km2();
  auto f = std::make_shared<HalfAlgebra>(d, 3);
  CoveringAlgebra u(f, 3);
  IParams p = default_params(*d);
  p.tau = {1, 0};
  IDividedPower x = idivided_power(u, p, 0, 3, IParity::Odd);
  PbwElement b = embed_b(u, p, 0);
  EXPECT_EQ(x.value, u.mul(b, u.mul(b, b)).scaled(qpi_factorial(3).inverse()));
  EXPECT_EQ(x.symbolic, "B^3/[3]!");
}

TEST(Iqsp, ClassicalSpecialization) {
  for (const auto& name : {"rank1", "b02"}) {
    auto d = Datum::builtin(name);
    IParams p = default_params(*d);
    for (int i = 0; i < d->rank(); ++i) {
      const int di = d->d(i);
      QPiScalar s = p.varsigma[static_cast<size_t>(i)];
      for (IParity par : kParities)
        for (int m = 0; m <= 6; ++m) {
          BPoly b = BPoly::var();
          BPoly want = m % 2 ? b : BPoly::constant(1);
          for (int j = 1; j <= m / 2; ++j) {
            int n = par == IParity::Odd ? 2 * j - 1 : (m % 2 ? 2 * j : 2 * j - 2);
            QPiScalar br = classical_int(n, di);
            want = want * (b * b - BPoly::constant(s.shifted(di, 0) * br * br));
          }
          QPiScalar fact(1);
          for (int t = 1; t <= m; ++t) fact *= classical_int(t, di);
          want = want.scaled(fact.inverse());
          EXPECT_EQ(classical(idivided_poly(*d, p, i, m, par)), classical(want)) << name << " i=" << i << " m=" << m;
        }
    }
  }
}

TEST(Iqsp, PsiIOnGenerators) {
  auto d = Datum::rank1();
  IExpr b = IExpr::b(0);
  EXPECT_EQ(psi_i(b), b);
  EXPECT_EQ(psi_i(b.scaled(QPiScalar::q())), b.scaled(QPiScalar::monomial(1, -1, 1)));
  EXPECT_EQ(psi_i(IExpr::jt(0)), IExpr::jt(0));
  YCoweight mu({1});
  EXPECT_EQ(psi_i(IExpr::k(mu)), IExpr::gen({IGen::J, 0, mu}) * IExpr::k(-mu));
  IExpr x = b * b + IExpr::jt(0).scaled(QPiScalar::monomial(3, 2, 0));
  EXPECT_EQ(psi_i(psi_i(x)), x);
  EXPECT_THROW(psi_i(PbwElement{}), UnsupportedPresentation);
}

TEST(Iqsp, DividedPowersAreBarInvariant) {
  for (const auto& name : {"rank1", "b02", "b03", "km2"}) {
    auto d = Datum::builtin(name);
    IParams p = default_params(*d);
    for (int i = 0; i < d->rank(); ++i)
      for (IParity par : kParities)
        for (int m = 0; m <= 6; ++m) {
          IExpr x = idivided_poly(*d, p, i, m, par).to_expr(i);
          EXPECT_EQ(psi_i(x), x) << name << " i=" << i << " m=" << m;
        }
  }
}

TEST(Iqsp, BarInvarianceNeedsValidParameters) {
  auto d = Datum::rank1();
  IParams p = split_params(*d, QPiScalar(1));
  IExpr x = idivided_poly(*d, p, 0, 2, IParity::Odd).to_expr(0);
  EXPECT_NE(psi_i(x), x);
}

TEST(Iqsp, LeadingTermRank1) {
  Env e("rank1", 6);
  auto& u = *e.u;
  IParams p = default_params(*e.d);
  for (int n = 0; n <= 6; ++n) {
    for (int l = -3; l <= 4; ++l) {
      XWeight lambda({l});
      IParity tag = parity_tag(*e.d, 0, lambda);
      PbwElement x = at_weight(u, idivided_power(u, p, 0, n, tag).value, lambda);
      for (const auto& [k, c] : x.terms) {
        const int a = k.fwt.height(), b = k.ewt.height();
        QPiScalar divided = c * qpi_factorial(a) * qpi_factorial(b);
        if (a == n) {
          EXPECT_EQ(b, 0);
          EXPECT_TRUE(divided.is_one()) << "n=" << n << " lambda=" << l;
        } else {
          EXPECT_LT(a, n);
          EXPECT_TRUE(divided.in_integral_form()) << "n=" << n << " lambda=" << l << " a=" << a << " b=" << b
                                                  << " c=" << to_string(divided);
        }
      }
    }
  }
}

TEST(Iqsp, CoidealCoproduct) {
  for (const auto& name : {"rank1", "b02"}) {
    Env e(name, 2);
    auto& u = *e.u;
    IParams p = default_params(*e.d);
    for (int i = 0; i < e.d->rank(); ++i) {
      PbwElement b = embed_b(u, p, i);
      TensorElement want = u.tensor(b, u.Kt(i, -1));
      want += u.tensor(u.one(), u.F(i));
      want += u.tensor(u.Jt(i), u.mul(u.E(i), u.Kt(i, -1))).scaled(p.varsigma[static_cast<size_t>(i)]);
      EXPECT_EQ(u.coproduct(b, 2), want) << name << " i=" << i;
    }
  }
}

TEST(Iqsp, LeadingTermNeedsMatchingParity) {
  Env e("rank1", 4);
  auto& u = *e.u;
  IParams p = default_params(*e.d);
  for (int l = -2; l <= 3; ++l) {
    XWeight lambda({l});
    IParity wrong = parity_tag(*e.d, 0, lambda) == IParity::Even ? IParity::Odd : IParity::Even;
    bool all_integral = true;
    for (int n = 2; n <= 4; ++n)
      for (const auto& [k, c] : at_weight(u, idivided_power(u, p, 0, n, wrong).value, lambda).terms)
        if (!(c * qpi_factorial(k.fwt.height()) * qpi_factorial(k.ewt.height())).in_integral_form()) all_integral = false;
    EXPECT_FALSE(all_integral) << "lambda=" << l;
  }
}
