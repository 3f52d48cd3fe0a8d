#pragma once

#include <stdexcept>
#include <string>

namespace fsq {

/// Base class for every error raised by the library. `code()` is a stable
/// machine-readable identifier used in CLI error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define FSQ_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

FSQ_DEFINE_ERROR(UnknownState);
FSQ_DEFINE_ERROR(WavelengthOutOfRange);
FSQ_DEFINE_ERROR(TableFormatError);
FSQ_DEFINE_ERROR(NonUnitPolarization);
FSQ_DEFINE_ERROR(DegenerateLabeling);
FSQ_DEFINE_ERROR(NumericalError);
FSQ_DEFINE_ERROR(QuadratureNotConverged);
FSQ_DEFINE_ERROR(UnreachableWaist);
FSQ_DEFINE_ERROR(GridTooCoarse);
FSQ_DEFINE_ERROR(NotTrapping);
FSQ_DEFINE_ERROR(ModelMismatch);
FSQ_DEFINE_ERROR(FitFailed);
FSQ_DEFINE_ERROR(WindowTooShort);
FSQ_DEFINE_ERROR(ConfigError);
FSQ_DEFINE_ERROR(InvalidArgument);

#undef FSQ_DEFINE_ERROR

/// Raised by the envelope fit when the data show no significant decay. Carries
/// the smallest T2 compatible with the observation.
class NoDecayObserved : public Error {
 public:
  NoDecayObserved(const std::string& what, double t2_lower_bound_s)
      : Error("NoDecayObserved", what), lower_bound_(t2_lower_bound_s) {}
  double t2_lower_bound() const noexcept { return lower_bound_; }

 private:
  double lower_bound_;
};

}  // namespace fsq
