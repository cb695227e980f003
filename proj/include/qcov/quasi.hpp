#pragma once

#include <map>
#include <string>
#include <vector>

#include "qcov/pbw.hpp"

namespace qcov {

struct CheckResult {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

// Theta = sum_nu Theta_nu, one tensor element per weight of height <= bound.
struct ThetaExpansion {
  int bound = 0;
  std::map<RootWeight, TensorElement> parts;
  TensorElement total() const;
};

ThetaExpansion theta(CoveringAlgebra& u, int bound);

// Upsilon = sum_mu Upsilon_mu with Upsilon_mu in f_mu (acting through x -> x^+).
struct UpsilonExpansion {
  int bound = 0;
  IParams params;
  std::map<RootWeight, HalfVec> parts;  // every mu of height <= bound
  bool odd_part_zero = true;            // sigma-tagged (odd parity) part vanished
  const HalfVec& at(const RootWeight& mu) const { return parts.at(mu); }
};

// Constants of the left and right recursions. For tau i = i both are
// -c_i q_i^3 / (1 - pi_i q_i^{-2}). Otherwise left is -c_i q_i q^{i.tau i} / (1 - pi_i q_i^{-2})
// and right is -pi_i bar(c_i) q_i / (1 - pi_i q_i^{-2}).
QPiScalar upsilon_xi(const Datum& d, const IParams& p, int i, bool right = false);

// The functional Upsilon^* on 'f defined by the left or right recursion.
class UpsilonFunctional {
 public:
  UpsilonFunctional(HalfAlgebra& f, IParams params);
  QPiScalar left(const Word& w);
  QPiScalar right(const Word& w);
  QPiScalar left(const FreeElement& x);
  QPiScalar right(const FreeElement& x);

 private:
  HalfAlgebra& f_;
  IParams params_;
  std::vector<QPiScalar> xi_l_, xi_r_;
  std::map<Word, QPiScalar> left_, right_;
};

// Builds Upsilon up to `bound`. With `check` set, the left/right recursions are
// compared on every word, Upsilon^* is checked to vanish on the radical, and the
// derivation identities for r_i and ir are asserted; any failure throws
// ConsistencyFailure.
UpsilonExpansion upsilon(HalfAlgebra& f, const IParams& params, int bound, bool check = true);

// a_{2k} = (-c pi q^2)^k (pi q - q^{-1})^k q^{-k^2} [2k-1]!!
QPiScalar rank1_closed(int k, const QPiScalar& c);

CheckResult verify_recursions(HalfAlgebra& f, const UpsilonExpansion& ups);
CheckResult verify_inverse(HalfAlgebra& f, const UpsilonExpansion& ups);

PbwElement upsilon_pbw(CoveringAlgebra& u, const UpsilonExpansion& ups);
PbwElement upsilon_bar_pbw(CoveringAlgebra& u, const UpsilonExpansion& ups);

// B_i = F_i + varsigma_i E_{tau i} K~_i^{-1} and psi(B_i) = F_i + bar(varsigma_i) E_{tau i} J~_i K~_i.
PbwElement b_generator(CoveringAlgebra& u, const IParams& p, int i);
PbwElement psi_b_generator(CoveringAlgebra& u, const IParams& p, int i);

// B_i Upsilon = Upsilon psi(B_i), compared on every E-height h that the
// truncation determines exactly (h + 1 <= N, or h = N for even N).
CheckResult verify_intertwiner(CoveringAlgebra& u, const UpsilonExpansion& ups, int i);

// Delta(x) Theta = Theta Delta-bar(x), compared on second-leg E-height <= N - 1.
CheckResult verify_theta_intertwining(CoveringAlgebra& u, const ThetaExpansion& th, const PbwElement& x);

// Theta^i = Delta(Upsilon) Theta (bar(Upsilon) (x) 1), keeping only the terms the
// truncation determines: ht(mu) <= N and e1 + ht(mu) - f1 <= N, with e1/f1 the
// first-leg E/F heights and mu the second-leg weight.
struct ThetaIExpansion {
  int bound = 0;
  std::map<RootWeight, TensorElement> parts;  // keyed by second-leg weight mu
  TensorElement total() const;
};

ThetaIExpansion theta_i(CoveringAlgebra& u, const UpsilonExpansion& ups, const ThetaExpansion& th);
bool theta_i_exact(const TensorKey& k, int bound);

CheckResult verify_theta_i_parity(CoveringAlgebra& u, const ThetaIExpansion& ti);
// (1 (x) r_i) Theta^i = -(pi_i q_i - q_i^{-1}) Theta^i (B_i (x) 1 + bar(c_i) q^s J~_i (x) E_i),
// s = extra_q_shift. The intertwining relations force s = 0; the form with
// s = 2 d_i (from writing psi(E_i K~_i^{-1}) as J~_i K~_i E_i) does not hold.
CheckResult verify_theta_i_derivation(CoveringAlgebra& u, const ThetaIExpansion& ti, const IParams& p, int i,
                                      int extra_q_shift = 0);

struct IntegralityEntry {
  RootWeight mu;
  bool integral = false;
  std::string method;
};

// Rank one: the coefficient of E^(2k). Otherwise coordinates in bases made of
// divided-power monomials (fewest runs first, bounded subset search); integral
// coordinates in any such basis prove membership in the integral form, and
// failure to find one leaves it undecided (integral = false).
std::vector<IntegralityEntry> integrality_report(HalfAlgebra& f, const UpsilonExpansion& ups);

}  // namespace qcov
