#pragma once

#include <stdexcept>
#include <string>

namespace clqr {

/// Constraint rows are linearly dependent and the right-hand side cannot be
/// met; the message names the offending contact rows.
class RankDeficiencyError : public std::runtime_error {
 public:
  explicit RankDeficiencyError(const std::string& what) : std::runtime_error(what) {}
};

/// Linearization requested at a state that violates the contact constraint.
class InconsistentOperatingPointError : public std::runtime_error {
 public:
  explicit InconsistentOperatingPointError(const std::string& what) : std::runtime_error(what) {}
};

/// LQR synthesis failed (typically an unstabilizable pair).
class SynthesisError : public std::runtime_error {
 public:
  explicit SynthesisError(const std::string& what) : std::runtime_error(what) {}
};

/// No keyframe controller matches the estimated contact set.
class NoMatchingKeyframeError : public std::runtime_error {
 public:
  explicit NoMatchingKeyframeError(const std::string& what) : std::runtime_error(what) {}
};

/// Inverse kinematics could not reach the requested targets.
class UnreachableTargetError : public std::runtime_error {
 public:
  UnreachableTargetError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Bad configuration file (missing file, schema violation). The message
/// carries the file path and the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace clqr
