#pragma once

#include <stdexcept>
#include <string>

namespace teichlab {

// Base of every domain failure. `name()` is the machine-readable tag emitted
// by the CLI in {"error": name, "detail": what()}.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& detail)
      : std::runtime_error(detail), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define TEICHLAB_DEFINE_ERROR(Type)                                   \
  class Type : public Error {                                         \
   public:                                                            \
    explicit Type(const std::string& detail) : Error(#Type, detail) {} \
  };

TEICHLAB_DEFINE_ERROR(TieError)
TEICHLAB_DEFINE_ERROR(ReducibleError)
TEICHLAB_DEFINE_ERROR(DivergenceError)
TEICHLAB_DEFINE_ERROR(BoundaryError)
TEICHLAB_DEFINE_ERROR(OverflowError)
TEICHLAB_DEFINE_ERROR(ValidationError)
TEICHLAB_DEFINE_ERROR(NonMinimalError)
TEICHLAB_DEFINE_ERROR(ConvergenceError)
TEICHLAB_DEFINE_ERROR(MeanError)
TEICHLAB_DEFINE_ERROR(ResonanceError)
TEICHLAB_DEFINE_ERROR(RationalError)
TEICHLAB_DEFINE_ERROR(ScaleExhausted)

#undef TEICHLAB_DEFINE_ERROR

// Raised when a straight-line trajectory enters the exclusion tube around a
// polygon vertex. `distance` is the arc length travelled before the hit.
class SingularityHit : public Error {
 public:
  SingularityHit(double distance, const std::string& detail)
      : Error("SingularityHit", detail), distance_(distance) {}
  double distance() const noexcept { return distance_; }

 private:
  double distance_;
};

}  // namespace teichlab
