#pragma once

#include <stdexcept>
#include <string>

namespace spreadlab {

// Every library failure carries a stable code name used by the CLI and tests.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SPREADLAB_ERROR(Name)                                       \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

SPREADLAB_ERROR(NotPrime);
SPREADLAB_ERROR(PolyReducible);
SPREADLAB_ERROR(ZeroElement);
SPREADLAB_ERROR(ZeroPolynomial);
SPREADLAB_ERROR(UnsupportedCharacteristic);
SPREADLAB_ERROR(IncompatibleKind);
SPREADLAB_ERROR(NotIsometry);
SPREADLAB_ERROR(SingularVector);
SPREADLAB_ERROR(DegenerateForm);
SPREADLAB_ERROR(IncompatibleDegree);
SPREADLAB_ERROR(NoSuchType);
SPREADLAB_ERROR(HypothesisViolation);
SPREADLAB_ERROR(TooLarge);
SPREADLAB_ERROR(NotBijection);
SPREADLAB_ERROR(FormNotPreserved);
SPREADLAB_ERROR(IdentityElement);
SPREADLAB_ERROR(BudgetExceeded);
SPREADLAB_ERROR(InconclusiveFusion);
SPREADLAB_ERROR(IndexTooLarge);
SPREADLAB_ERROR(AmbiguousMatch);
SPREADLAB_ERROR(NotFoundWithinCap);
SPREADLAB_ERROR(ParseError);
SPREADLAB_ERROR(VersionMismatch);
SPREADLAB_ERROR(UnknownName);

#undef SPREADLAB_ERROR

}  // namespace spreadlab
