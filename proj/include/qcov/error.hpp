#pragma once

#include <stdexcept>
#include <string>

namespace qcov {

// Base of every library error. `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define QCOV_DEFINE_ERROR(Name)                                          \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(#Name, what) {}       \
  };

QCOV_DEFINE_ERROR(NonInvertible)
QCOV_DEFINE_ERROR(NegativeWeight)
QCOV_DEFINE_ERROR(IndeterminateOrder)
QCOV_DEFINE_ERROR(InvalidDatum)
QCOV_DEFINE_ERROR(DimensionMismatch)
QCOV_DEFINE_ERROR(SameIndex)
QCOV_DEFINE_ERROR(TruncationOverflow)
QCOV_DEFINE_ERROR(ConsistencyFailure)
QCOV_DEFINE_ERROR(UnsupportedPresentation)
QCOV_DEFINE_ERROR(RankUnsupported)
QCOV_DEFINE_ERROR(NotDominant)
QCOV_DEFINE_ERROR(TriangularityFailure)
QCOV_DEFINE_ERROR(LatticeNotPreserved)
QCOV_DEFINE_ERROR(DepthExceeded)
QCOV_DEFINE_ERROR(WeightOutOfRange)
QCOV_DEFINE_ERROR(ParseError)

#undef QCOV_DEFINE_ERROR

}  // namespace qcov
