#pragma once

#include <stdexcept>
#include <string>

namespace hawking {

// Base class for all library errors. `code()` is a short stable identifier
// used by the command line tool when reporting a failing check.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define HAWKING_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(Code, what) {}          \
  };

HAWKING_DEFINE_ERROR(DomainError, "DomainError")
HAWKING_DEFINE_ERROR(DomainExit, "DomainExit")
HAWKING_DEFINE_ERROR(StepLimit, "StepLimit")
HAWKING_DEFINE_ERROR(GridTooCoarse, "GridTooCoarse")
HAWKING_DEFINE_ERROR(PerturbationTooLarge, "PerturbationTooLarge")
HAWKING_DEFINE_ERROR(DegenerateSurface, "DegenerateSurface")
HAWKING_DEFINE_ERROR(BandLimitExceeded, "BandLimitExceeded")
HAWKING_DEFINE_ERROR(FitUnstable, "FitUnstable")
HAWKING_DEFINE_ERROR(RadiusOutOfRange, "RadiusOutOfRange")
HAWKING_DEFINE_ERROR(ConfigError, "ConfigError")

#undef HAWKING_DEFINE_ERROR

}  // namespace hawking
