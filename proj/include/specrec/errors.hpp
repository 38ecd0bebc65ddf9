#pragma once

#include <stdexcept>
#include <string>

namespace specrec {

// Base for everything the library throws. `kind()` is a stable machine
// name; the CLI maps it onto its JSON diagnostics and exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define SPECREC_ERROR_KIND(NAME)                             \
  class NAME : public Error {                                \
   public:                                                   \
    explicit NAME(const std::string& m) : Error(#NAME, m) {} \
  }

SPECREC_ERROR_KIND(DimensionMismatch);
SPECREC_ERROR_KIND(InvalidArgument);
SPECREC_ERROR_KIND(DegenerateSpectrum);
SPECREC_ERROR_KIND(NormalizedInput);
SPECREC_ERROR_KIND(ConstantSignal);
SPECREC_ERROR_KIND(NonPositive);
SPECREC_ERROR_KIND(ZeroWavelength);
SPECREC_ERROR_KIND(ZeroIntensity);
SPECREC_ERROR_KIND(NoForwardContext);
SPECREC_ERROR_KIND(BadMagic);
SPECREC_ERROR_KIND(VersionMismatch);
SPECREC_ERROR_KIND(TruncatedFile);
SPECREC_ERROR_KIND(IoError);
SPECREC_ERROR_KIND(BadConfig);

#undef SPECREC_ERROR_KIND

}  // namespace specrec
