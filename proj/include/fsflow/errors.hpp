#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fsflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. density <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid grid sizes, viscosities, or run parameters. Carries every violation
/// found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  explicit ConfigError(const std::string& violation)
      : ConfigError(std::vector<std::string>{violation}) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += "; ";
      out += v[i];
    }
    return out;
  }
  std::vector<std::string> violations_;
};

/// Layer depth exceeds (1/g) * integral of P'(s)/s from rho* to infinity.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(const std::string& what, double bound) : Error(what), bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, double min_jacobian)
      : Error(what), min_jacobian_(min_jacobian) {}
  double min_jacobian() const { return min_jacobian_; }

 private:
  double min_jacobian_;
};

/// Reconstructed density left the admissible band or the enthalpy range.
class StateBlowupError : public Error {
 public:
  StateBlowupError(const std::string& what, double min_density)
      : Error(what), min_density_(min_density) {}
  double min_density() const { return min_density_; }

 private:
  double min_density_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, long mode) : Error(what), mode_(mode) {}
  long mode() const { return mode_; }

 private:
  long mode_;
};

class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& what, double mismatch) : Error(what), mismatch_(mismatch) {}
  double mismatch() const { return mismatch_; }

 private:
  double mismatch_;
};

/// Time step exceeds the CFL/explicit-term limit.
class StepRejectedError : public Error {
 public:
  StepRejectedError(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

}  // namespace fsflow
