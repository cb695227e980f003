#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "qcov/datum.hpp"

using namespace qcov;

namespace {

bool has_condition(const std::vector<Violation>& v, const std::string& c) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.condition == c; });
}

// Sum over a<b of p(i_a)p(i_b) for an explicit ordering of letters.
int e_by_ordering(const Datum& d, const std::vector<int>& letters) {
  int s = 0;
  for (size_t a = 0; a < letters.size(); ++a)
    for (size_t b = a + 1; b < letters.size(); ++b) s += d.p(letters[a]) * d.p(letters[b]);
  return s;
}

}  // namespace

TEST(Datum, BuiltinsValidate) {
  for (const auto& name : Datum::builtin_names()) {
    auto d = Datum::builtin(name);
    ASSERT_TRUE(d) << name;
    auto v = validate_datum(d->cartan(), d->root());
    EXPECT_TRUE(v.empty()) << name << ": " << (v.empty() ? "" : v[0].message);
    EXPECT_TRUE(validate_params(default_params(*d), *d).empty()) << name;
  }
}

TEST(Datum, B02Shape) {
  auto d = Datum::b0n(2);
  EXPECT_EQ(d->p(0), 1);
  EXPECT_EQ(d->p(1), 0);
  EXPECT_EQ(d->a(0, 1), -2);
  EXPECT_EQ(d->a(1, 0), -1);
}

TEST(Datum, ParityMismatchViolatesE) {
  SuperCartanDatum c;
  c.dot = {{4}};
  c.parity = {1};
  RootDatum r{1, {{1}}, {{2}}};
  auto v = validate_datum(c, r);
  ASSERT_TRUE(has_condition(v, "(e)"));
  auto it = std::find_if(v.begin(), v.end(), [](const Violation& x) { return x.condition == "(e)"; });
  EXPECT_NE(it->message.find("bar-consistency"), std::string::npos);
}

TEST(Datum, OtherConditions) {
  SuperCartanDatum c;
  c.dot = {{2, -1}, {-1, 2}};
  c.parity = {1, 1};
  RootDatum r{2, {{1, 0}, {0, 1}}, {{2, -1}, {-1, 2}}};
  auto v = validate_datum(c, r);
  EXPECT_TRUE(has_condition(v, "(f)"));
  EXPECT_TRUE(has_condition(v, "(d)"));
  c.dot = {{4, 0}, {0, 4}};
  c.parity = {0, 0};
  r.roots = {{2, 0}, {0, 2}};
  EXPECT_TRUE(has_condition(validate_datum(c, r), "(c)"));
  c.super = false;
  EXPECT_TRUE(validate_datum(c, r).empty());
  c.dot = {{4, 2}, {2, 4}};
  EXPECT_TRUE(has_condition(validate_datum(c, r), "(b)"));
}

TEST(Datum, ParamsBar1) {
  auto d = Datum::b0n(2);
  IParams good = default_params(*d);
  EXPECT_TRUE(validate_params(good, *d).empty());
  IParams bad = split_params(*d, QPiScalar(1));
  EXPECT_TRUE(has_condition(validate_params(bad, *d), "(bar1)"));
  auto r1 = Datum::rank1();
  EXPECT_TRUE(validate_params(split_params(*r1, QPiScalar(1)), *r1).empty());
}

TEST(Datum, ParamsTauBranches) {
  // two orthogonal odd roots swapped by tau
  SuperCartanDatum c;
  c.dot = {{2, 0}, {0, 2}};
  c.parity = {1, 1};
  RootDatum r{2, {{1, 0}, {0, 1}}, {{2, 0}, {0, 2}}};
  Datum d("pair", c, r);
  IParams p{{1, 0}, {QPiScalar(1), QPiScalar(1)}};
  EXPECT_TRUE(validate_params(p, d).empty());
  p.varsigma[1] = QPiScalar(2);
  EXPECT_TRUE(has_condition(validate_params(p, d), "(bar2)"));
  // two linked even roots swapped by tau: varsigma_2 = q_1 bar(varsigma_1)
  SuperCartanDatum e;
  e.dot = {{4, -2}, {-2, 4}};
  e.parity = {0, 0};
  e.super = false;
  Datum de("a2", e, RootDatum{2, {{1, 0}, {0, 1}}, {{2, -1}, {-1, 2}}});
  IParams pe{{1, 0}, {QPiScalar(1), QPiScalar::monomial(1, 2, 0)}};
  EXPECT_TRUE(validate_params(pe, de).empty());
  pe.varsigma[1] = QPiScalar(1);
  EXPECT_TRUE(has_condition(validate_params(pe, de), "(bar3)"));
}

TEST(Datum, WeightStatsAndE) {
  auto d = Datum::b0n(2);
  EXPECT_EQ(d->weight_stats(RootWeight({1, 0})).e_nu, 0);
  EXPECT_EQ(d->weight_stats(RootWeight({2, 0})).e_nu, 1);
  EXPECT_EQ(d->weight_stats(RootWeight({1, 1})).e_nu, 0);
  EXPECT_THROW(d->weight_stats(RootWeight({-1, 0})), NegativeWeight);
  // brute force over all orderings of all weights with height <= 6
  for (const auto& name : Datum::builtin_names()) {
    auto dd = Datum::builtin(name);
    std::vector<RootWeight> ws{RootWeight::zero(dd->rank())};
    for (size_t k = 0; k < ws.size(); ++k) {
      if (ws[k].height() >= 6) continue;
      for (int i = 0; i < dd->rank(); ++i) {
        RootWeight w = ws[k] + RootWeight::simple(dd->rank(), i);
        if (std::find(ws.begin(), ws.end(), w) == ws.end()) ws.push_back(w);
      }
    }
    for (const auto& w : ws) {
      std::vector<int> letters;
      for (int i = 0; i < dd->rank(); ++i) letters.insert(letters.end(), static_cast<size_t>(w[i]), i);
      auto st = dd->weight_stats(w);
      do {
        ASSERT_EQ(e_by_ordering(*dd, letters), st.e_nu);
      } while (std::next_permutation(letters.begin(), letters.end()));
      EXPECT_EQ(st.pi_nu, QPiScalar::monomial(1, 0, dd->dot(w, w) / 2)) << name;
    }
  }
}

TEST(Datum, SymmetrizableCartan) {
  for (const auto& name : Datum::builtin_names()) {
    auto d = Datum::builtin(name);
    for (int i = 0; i < d->rank(); ++i)
      for (int j = 0; j < d->rank(); ++j) {
        EXPECT_EQ(d->d(i) * d->a(i, j), d->d(j) * d->a(j, i));
        EXPECT_EQ(d->pair(i, d->root_x(j)), d->a(i, j));
      }
  }
}

TEST(Datum, LeqPartialOrder) {
  auto d = Datum::b0n(2);
  XWeight l({1, 2});
  EXPECT_TRUE(d->leq(l, l));
  EXPECT_TRUE(d->leq(l, l + d->root_x(0)));
  EXPECT_FALSE(d->leq(l + d->root_x(0), l));
  std::string diag;
  EXPECT_FALSE(d->leq(l, l + XWeight({1, 0}), &diag));
  EXPECT_NE(diag.find("IndeterminateOrder"), std::string::npos);
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> c(-1, 2);
  auto sample = [&] { return l + d->root_x(0) * c(rng) + d->root_x(1) * c(rng); };
  for (int t = 0; t < 300; ++t) {
    XWeight a = sample(), b = sample(), e = sample();
    if (d->leq(a, b) && d->leq(b, a)) EXPECT_EQ(a, b);
    if (d->leq(a, b) && d->leq(b, e)) EXPECT_TRUE(d->leq(a, e));
  }
}

TEST(Datum, IotaLattices) {
  auto d = Datum::rank1();
  IParams p = default_params(*d);
  EXPECT_TRUE(iota_coweights(*d, p).empty());
  EXPECT_EQ(iota_class(*d, p, XWeight({5})), XWeight({1}));
  EXPECT_EQ(iota_class(*d, p, XWeight({-1})), XWeight({3}));
  // B_i has X_i-weight -i' = +i' (mod 2i' + 2i')
  XWeight lam({3});
  EXPECT_EQ(iota_class(*d, p, lam - d->root_x(0)), iota_class(*d, p, lam + d->root_x(0)));
}

TEST(Datum, JsonRoundTrip) {
  const std::string text = R"({"I":[1,2],"dot":[[2,-2],[-2,4]],"parity":[1,0],
    "varsigma":[{"plus":"q^-1","minus":"q^-1"},"q^-2"],"X_rank":2,"pairing":[[1,0],[0,1]]})";
  auto ld = load_datum_json(text);
  EXPECT_TRUE(validate_datum(ld.datum->cartan(), ld.datum->root()).empty());
  EXPECT_TRUE(validate_params(ld.params, *ld.datum).empty());
  EXPECT_EQ(ld.datum->a(0, 1), -2);
  EXPECT_EQ(ld.datum->root_x(0), XWeight({2, -1}));
  auto again = load_datum_json(datum_to_json(*ld.datum, ld.params));
  EXPECT_EQ(again.datum->root().roots, ld.datum->root().roots);
  EXPECT_EQ(again.params.varsigma[1], ld.params.varsigma[1]);
  EXPECT_THROW(load_datum_json("{"), ParseError);
  EXPECT_THROW(load_datum_json(R"({"I":[1]})"), InvalidDatum);
}
