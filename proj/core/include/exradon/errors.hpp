#pragma once

#include <stdexcept>
#include <string>

namespace exradon {

enum class Errc {
  EmptyRegion,
  NotNormalizable,
  DegenerateMap,
  SingularPoint,
  NotDifferentiable,
  DivergentTransform,
  SingularLine,
  GridTooSmall,
  AnchorMissing,
  OutsideStrip,
  DivergentMoment,
  InvalidArgument,
  ConfigInvalid,
  IoFailure,
};

/// Library error carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace exradon
