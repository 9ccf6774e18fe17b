#pragma once

#include <stdexcept>
#include <string>

namespace yamabe {

// Base for every error raised by the library. Callers that only want to
// record a failure (the lab does this per seed) catch this type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* tag() const noexcept { return "Error"; }
};

#define YAMABE_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(what) {}        \
    const char* tag() const noexcept override { return #Name; }    \
  }

// manifold
YAMABE_DEFINE_ERROR(DimensionMismatch);
YAMABE_DEFINE_ERROR(InverseOutsideInjectivityRadius);
YAMABE_DEFINE_ERROR(InvalidManifold);

// field / elliptic / energy
YAMABE_DEFINE_ERROR(ManifoldMismatch);
YAMABE_DEFINE_ERROR(CoercivityViolated);
YAMABE_DEFINE_ERROR(InvalidParameter);
YAMABE_DEFINE_ERROR(NoConvergence);
YAMABE_DEFINE_ERROR(ZeroField);

// groundstate / bubble
YAMABE_DEFINE_ERROR(BracketNotFound);
YAMABE_DEFINE_ERROR(SubcriticalityViolated);
YAMABE_DEFINE_ERROR(CutoffExceedsInjectivityRadius);
YAMABE_DEFINE_ERROR(OverlappingSupports);

// flow
YAMABE_DEFINE_ERROR(StepCollapse);

// concentration
YAMABE_DEFINE_ERROR(NotConcentrated);
YAMABE_DEFINE_ERROR(NegativeValues);
YAMABE_DEFINE_ERROR(NotSignChanging);

// lab
YAMABE_DEFINE_ERROR(ConfigError);
YAMABE_DEFINE_ERROR(MixedEps);
YAMABE_DEFINE_ERROR(CorruptArchive);
YAMABE_DEFINE_ERROR(VersionMismatch);

#undef YAMABE_DEFINE_ERROR

}  // namespace yamabe
