#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcov/iqsp.hpp"

namespace qcov {

using Vec = std::vector<QPiScalar>;

// Finite-dimensional weight module given by explicit matrices on a fixed basis.
struct WeightModule {
  std::shared_ptr<const Datum> datum;
  std::vector<XWeight> weights;
  std::vector<int> parity;
  std::vector<std::string> labels;
  std::vector<Matrix> E, F;  // one per i in I
  int highest = 0;           // index of eta_lambda when there is one

  int dim() const { return static_cast<int>(weights.size()); }
  Matrix K(const YCoweight& mu) const;
  Matrix J(const YCoweight& mu) const;
  Matrix e_word(const Word& w) const;
  Matrix f_word(const Word& w) const;
  // Largest height of a difference of two weights of the module.
  int depth() const;
  // Same module written in the basis given by the columns of `p`.
  WeightModule rebased(const Matrix& p, std::vector<std::string> new_labels) const;
};

// Matrix of a normal-form element of U acting on M.
Matrix act(CoveringAlgebra& u, const PbwElement& x, const WeightModule& m);
// Matrix of an element of U (x) U on A (x) B; basis index a * dim(B) + b.
Matrix act(CoveringAlgebra& u, const TensorElement& x, const WeightModule& a, const WeightModule& b);

// Truncated Verma module: basis (nu, l) for ht(nu) <= N, the l-th pivot of f_nu
// applied to eta_lambda. F acting out of height N is dropped.
WeightModule verma(CoveringAlgebra& u, const XWeight& lambda, int height);

// L(lambda) as the quotient of the Verma module by the submodule generated by
// F_i^{<i,lambda>+1} eta. `height` must exceed the depth of L(lambda), else DepthExceeded.
WeightModule simple(CoveringAlgebra& u, const XWeight& lambda, int height);

// E_i F_j - pi^{p(i)p(j)} F_j E_i, the Cartan relations and the Serre relations,
// checked as matrix identities (columns at the truncation edge excluded).
CheckResult audit_relations(CoveringAlgebra& u, const WeightModule& m, int truncation_height = -1);

// An antilinear operator v -> m * bar(v).
struct AntiLinear {
  Matrix m;
  Vec operator()(const Vec& v) const;
  Matrix square() const { return m * m.bar(); }  // this o this, a linear map
  bool involutive() const { return square().is_identity(); }
};

struct BasedModule {
  WeightModule mod;  // written in the distinguished basis
  AntiLinear psi;
};

// L(n) for rank one in the basis F^(k) eta, 0 <= k <= n; RankUnsupported otherwise.
BasedModule canonical_basis_rank1(CoveringAlgebra& u, int n);

// A strict partial order on basis indices of a module.
using BasisOrder = std::function<bool(int, int)>;
// b' < b when the weight of b' is strictly below that of b.
BasisOrder order_by_weight(const WeightModule& m);
// b' < b when the weight of b' is strictly above that of b (the direction of Upsilon).
BasisOrder order_by_weight_reversed(const WeightModule& m);

// The unique psi-invariant basis c_b = b + sum_{b' < b} p_{b'b} b' with
// p_{b'b} in q^{-1} Z^pi[q^{-1}]; columns of the result. TriangularityFailure if
// psi is not unitriangular for `order`; LatticeNotPreserved if an entry leaves
// Z^pi[q, q^{-1}]. `tie_break` reverses the linear extension used for processing.
Matrix bar_invariant_basis(const AntiLinear& psi, const BasisOrder& order, bool tie_break = false);

// Oracle: the same basis in one pi-component, by a dense linear solve over Q
// with unknown coefficients of q^{-1}, ..., q^{-degree}.
RMatrix dense_fixed_basis(const AntiLinear& psi, int sign, const BasisOrder& order, int degree);

struct TensorModule {
  WeightModule pairs;   // basis a (x) b
  BasedModule diamond;  // the same module in the diamond basis (psi there is the identity)
  Matrix change;        // columns: diamond elements in pair coordinates
  AntiLinear psi_pairs; // Theta o (psi (x) psi) in pair coordinates
};

WeightModule tensor_modules(const WeightModule& a, const WeightModule& b);
// Builds psi = Theta o (psi_a (x) psi_b) and the diamond basis.
TensorModule tensor(CoveringAlgebra& u, const BasedModule& a, const BasedModule& b);

// Order on pairs: same total weight and first-leg weight strictly lower.
BasisOrder order_pairs(const WeightModule& a, const WeightModule& b);

// psi_i = Upsilon o psi on a based module; DepthExceeded if Upsilon is too short.
AntiLinear psi_i_module(CoveringAlgebra& u, const UpsilonExpansion& ups, const BasedModule& m);
// psi_i = Theta^i o (psi_i (x) psi) on A (x) B, in the diamond basis.
AntiLinear psi_i_tensor(CoveringAlgebra& u, const UpsilonExpansion& ups, const ThetaIExpansion& ti,
                        const BasedModule& a, const BasedModule& b, const TensorModule& t);

// psi_i(x m) = psi_i(x) psi_i(m) for x = B_i and every basis vector m.
CheckResult verify_psi_i_intertwines(CoveringAlgebra& u, const IParams& p, const WeightModule& m,
                                     const AntiLinear& psi_i_op);

// LatticeNotPreserved (with the entry) unless every entry lies in Z^pi[q, q^{-1}].
void require_integral(const Matrix& m, const std::string& what);
std::optional<std::string> first_non_integral(const Matrix& m);

struct ICanonicalBasis {
  Matrix change;          // columns: b^i in the distinguished basis
  AntiLinear psi_i;
  BasisOrder order;
};

ICanonicalBasis icanonical_basis(const WeightModule& m, const AntiLinear& psi_i_op);

// Is x in q^{-1} Z^pi[q^{-1}]?
bool in_strict_negative(const QPiScalar& x);

// chi: L(sum lambda) -> L(lambda_1) (x) ... (x) L(lambda_l); true when every
// canonical basis element maps into diamond u pi * diamond. Rank one.
bool chi_check(CoveringAlgebra& u, const std::vector<int>& lambdas, std::string* detail = nullptr);
// U(eta (x) eta) inside L(lambda) (x) L(mu) is spanned by diamond elements. Rank one.
bool submodule_check(CoveringAlgebra& u, int lambda, int mu, std::string* detail = nullptr);

struct StabilizationStep {
  int nu = 0;
  // (a, b) -> coefficient of (E^(a) xi) <> (F^(b) eta) in the i-canonical element.
  std::map<std::pair<int, int>, QPiScalar> coefficients;
  Vec element;  // the same element in diamond coordinates; empty if the label does not fit
  bool psi_i_invariant = false;
};

struct StabilizationReport {
  int a = 0, b = 0;
  int lambda = 0, mu = 0;
  std::vector<StabilizationStep> steps;
  std::optional<int> stable_from;  // first nu whose element is, up to pi, the projection of the next one
  bool projection_linear = true;   // u(xi (x) eta) -> u(xi' (x) eta') was well defined at every step
};

// Rank one. Element labelled by b1 = E^(a), b2 = F^(b) in L(lambda + nu) (x) L(mu + nu),
// generated by xi (x) eta with xi the lowest weight vector, for nu = 0 .. steps - 1.
// Consecutive steps are compared through the U-map fixed by xi (x) eta -> xi' (x) eta'.
StabilizationReport stabilization(CoveringAlgebra& u, const UpsilonExpansion& ups, int a, int b, int lambda,
                                  int mu, int steps);

}  // namespace qcov
