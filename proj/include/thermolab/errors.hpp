#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

// Root of the library's exception hierarchy. Messages are prefixed with the
// module operation that failed, e.g. "periodic::periodic_points: ...".
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input or a misdeclared object. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed to deliver its guarantee. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define THERMO_DEFINE_ERROR(Name, Base)            \
  class Name : public Base {                       \
   public:                                         \
    explicit Name(const std::string& what)         \
        : Base(std::string(#Name ": ") + what) {}  \
  }

THERMO_DEFINE_ERROR(PointOutsideDomain, ValidationError);
THERMO_DEFINE_ERROR(DepthCapExceeded, ValidationError);
THERMO_DEFINE_ERROR(NodeBudgetExceeded, ValidationError);
THERMO_DEFINE_ERROR(NotMarkov, ValidationError);
THERMO_DEFINE_ERROR(CellStraddlesBranch, ValidationError);
THERMO_DEFINE_ERROR(MissingEquilibrium, ValidationError);
THERMO_DEFINE_ERROR(NoConvergence, NumericalError);
THERMO_DEFINE_ERROR(EmptyTree, NumericalError);
THERMO_DEFINE_ERROR(EmptyPeriodicSet, NumericalError);
THERMO_DEFINE_ERROR(ReducibleOperator, NumericalError);
THERMO_DEFINE_ERROR(NonConvexCurve, NumericalError);
THERMO_DEFINE_ERROR(EmptyDeviationSet, NumericalError);
THERMO_DEFINE_ERROR(CriticalValueHit, NumericalError);
THERMO_DEFINE_ERROR(RootCountDeficit, NumericalError);

#undef THERMO_DEFINE_ERROR

class HyperbolicityScreenFailed : public NumericalError {
 public:
  HyperbolicityScreenFailed(const std::string& what, double t)
      : NumericalError("HyperbolicityScreenFailed: " + what), t_(t) {}
  double failing_t() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace thermo
