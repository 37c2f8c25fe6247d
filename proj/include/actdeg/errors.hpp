#pragma once

#include <stdexcept>
#include <string>

namespace actdeg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension mismatch, malformed matrix, out-of-range index.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error("invalid input: " + what) {}
};

/// Nonpositive cutoff frequency or noise scaling.
class InvalidDegradation : public Error {
 public:
  explicit InvalidDegradation(const std::string& what) : Error("invalid degradation: " + what) {}
};

/// The system is not Hurwitz, so the requested norm is infinite.
class UnstableSystem : public Error {
 public:
  explicit UnstableSystem(const std::string& what) : Error("unstable system: " + what) {}
};

/// A documented precondition (e.g. open-loop stability) does not hold.
class PreconditionViolation : public Error {
 public:
  explicit PreconditionViolation(const std::string& what) : Error("precondition violated: " + what) {}
};

/// jwI - A is singular at a requested frequency.
class SingularResolvent : public Error {
 public:
  explicit SingularResolvent(const std::string& what) : Error("singular resolvent: " + what) {}
};

/// Simulation produced a non-finite state.
class Divergence : public Error {
 public:
  Divergence(const std::string& what, long step)
      : Error("divergence at step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace actdeg
