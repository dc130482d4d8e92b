#pragma once

#include <stdexcept>
#include <string>

namespace et14 {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define ET14_DEFINE_ERROR(Name)                          \
  struct Name : Error {                                  \
    explicit Name(const std::string& msg = #Name) : Error(msg) {} \
  }

ET14_DEFINE_ERROR(SingularX1);
ET14_DEFINE_ERROR(NearSingular);
ET14_DEFINE_ERROR(FormMismatch);
ET14_DEFINE_ERROR(ArityMismatch);
ET14_DEFINE_ERROR(SingularDenominator);
ET14_DEFINE_ERROR(NotStateC);
ET14_DEFINE_ERROR(LimitNotConverged);
ET14_DEFINE_ERROR(NotIndefinite);
ET14_DEFINE_ERROR(InconsistentScalars);
ET14_DEFINE_ERROR(SingularJacobian);
ET14_DEFINE_ERROR(NoConvergence);
ET14_DEFINE_ERROR(RetriesExhausted);
ET14_DEFINE_ERROR(NotDifferentiable);
ET14_DEFINE_ERROR(ParseError);

#undef ET14_DEFINE_ERROR

}  // namespace et14
