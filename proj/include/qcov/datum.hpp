#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcov/scalar.hpp"

namespace qcov {

// Element of Z[I], indexed by position in I.
struct RootWeight {
  std::vector<int> c;

  RootWeight() = default;
  explicit RootWeight(std::vector<int> v) : c(std::move(v)) {}
  static RootWeight zero(int rank) { return RootWeight(std::vector<int>(static_cast<size_t>(rank), 0)); }
  static RootWeight simple(int rank, int i);

  int rank() const { return static_cast<int>(c.size()); }
  int operator[](int i) const { return c[static_cast<size_t>(i)]; }
  int height() const;
  bool is_zero() const;
  bool nonnegative() const;
  RootWeight operator+(const RootWeight& o) const;
  RootWeight operator-(const RootWeight& o) const;
  RootWeight operator*(int k) const;
  auto operator<=>(const RootWeight&) const = default;
};

// Element of X (or Y) in the coordinates of the chosen lattice realization.
struct LatticeVector {
  std::vector<int> c;

  LatticeVector() = default;
  explicit LatticeVector(std::vector<int> v) : c(std::move(v)) {}
  static LatticeVector zero(int n) { return LatticeVector(std::vector<int>(static_cast<size_t>(n), 0)); }
  int size() const { return static_cast<int>(c.size()); }
  int operator[](int k) const { return c[static_cast<size_t>(k)]; }
  LatticeVector operator+(const LatticeVector& o) const;
  LatticeVector operator-(const LatticeVector& o) const;
  LatticeVector operator-() const;
  LatticeVector operator*(int k) const;
  bool is_zero() const;
  auto operator<=>(const LatticeVector&) const = default;
};

using XWeight = LatticeVector;
using YCoweight = LatticeVector;

struct SuperCartanDatum {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> dot;
  std::vector<int> parity;
  bool super = true;

  int rank() const { return static_cast<int>(dot.size()); }
  int d(int i) const { return dot[static_cast<size_t>(i)][static_cast<size_t>(i)] / 2; }
  int a(int i, int j) const {
    return 2 * dot[static_cast<size_t>(i)][static_cast<size_t>(j)] / dot[static_cast<size_t>(i)][static_cast<size_t>(i)];
  }
  int p(int i) const { return parity[static_cast<size_t>(i)]; }
};

// X = Z^x_rank; Y identified with Z^x_rank via the standard dual pairing.
// coroots[i] is the image of i in Y, roots[i] is i' in X.
struct RootDatum {
  int x_rank = 0;
  std::vector<std::vector<int>> coroots;
  std::vector<std::vector<int>> roots;
};

struct IParams {
  std::vector<int> tau;
  std::vector<QPiScalar> varsigma;
};

struct Violation {
  std::string condition;
  std::string message;
};

struct WeightStats {
  int height = 0;
  int parity = 0;
  QPiScalar q_nu;
  QPiScalar pi_nu;
  int e_nu = 0;
};

class Datum {
 public:
  Datum(std::string name, SuperCartanDatum cartan, RootDatum root);

  const std::string& name() const { return name_; }
  const SuperCartanDatum& cartan() const { return cartan_; }
  const RootDatum& root() const { return root_; }
  int rank() const { return cartan_.rank(); }
  int x_rank() const { return root_.x_rank; }
  int d(int i) const { return cartan_.d(i); }
  int a(int i, int j) const { return cartan_.a(i, j); }
  int p(int i) const { return cartan_.p(i); }
  int dot(int i, int j) const { return cartan_.dot[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  const std::string& label(int i) const { return cartan_.labels[static_cast<size_t>(i)]; }

  // nu . i  for nu in Z[I]
  int dot(const RootWeight& nu, int i) const;
  int dot(const RootWeight& a, const RootWeight& b) const;
  int parity(const RootWeight& nu) const;

  XWeight root_x(int i) const;
  YCoweight coroot_y(int i) const;
  // d_i * i in Y, the exponent of K~_i
  YCoweight tilde_y(int i) const;
  XWeight to_x(const RootWeight& nu) const;
  static int pair(const YCoweight& mu, const XWeight& lambda);
  // <i, lambda>
  int pair(int i, const XWeight& lambda) const { return pair(coroot_y(i), lambda); }

  WeightStats weight_stats(const RootWeight& nu) const;
  // Root-lattice coordinates of lambda' - lambda when it lies in the span of the i'.
  std::optional<RootWeight> root_difference(const XWeight& lambda, const XWeight& lambda2) const;
  bool leq(const XWeight& lambda, const XWeight& lambda2, std::string* diagnostic = nullptr) const;

  // Rank-one odd datum (covering sl2).
  static std::shared_ptr<const Datum> rank1();
  // B(0,n), n <= 3: roots 1..n-1 long even, root n short odd.
  static std::shared_ptr<const Datum> b0n(int n);
  // Rank-2 anisotropic Kac-Moody datum with a12 = a21 = -2, both roots odd.
  static std::shared_ptr<const Datum> km2();
  static std::shared_ptr<const Datum> builtin(const std::string& name);
  static std::vector<std::string> builtin_names();

 private:
  std::string name_;
  SuperCartanDatum cartan_;
  RootDatum root_;
};

std::vector<Violation> validate_datum(const SuperCartanDatum& d, const RootDatum& r);
std::vector<Violation> validate_params(const IParams& p, const Datum& d);

IParams default_params(const Datum& d);
// Split parameters tau = id with all varsigma_i equal to the given value.
IParams split_params(const Datum& d, const QPiScalar& varsigma);

// tau acting on Y by permuting coroot coordinates (requires Y spanned compatibly).
YCoweight tau_on_y(const Datum& d, const IParams& p, const YCoweight& mu);
// Basis of Y^i = { mu : tau(mu) = -mu }.
std::vector<YCoweight> iota_coweights(const Datum& d, const IParams& p);
// Canonical representative of the class of lambda in X_i = X / <i' + (tau i)'>.
XWeight iota_class(const Datum& d, const IParams& p, const XWeight& lambda);

struct LoadedDatum {
  std::shared_ptr<const Datum> datum;
  IParams params;
  bool params_given = false;
};

// Loads a JSON descriptor; throws InvalidDatum / ParseError on malformed input.
// Validation violations are not thrown; call validate_* on the result.
LoadedDatum load_datum_json(const std::string& text, const std::string& name = "custom");
std::string datum_to_json(const Datum& d, const IParams& p);

std::string render_weight(const RootWeight& nu);
std::string render_lattice(const LatticeVector& v);

}  // namespace qcov
