#pragma once

#include <stdexcept>
#include <string>

namespace fdsme {

// Grid/size mismatches and invalid run configurations.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateProjection : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Midpoint fixed point did not converge; the caller should reduce dt.
class StepSizeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class EstimationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Failure inside a trajectory, tagged with where it happened.
class TrajectoryError : public std::runtime_error {
public:
  TrajectoryError(const std::string& what, long long trajectory, double t)
      : std::runtime_error(what), trajectory_(trajectory), t_(t) {}
  long long trajectory() const { return trajectory_; }
  double time() const { return t_; }

private:
  long long trajectory_;
  double t_;
};

}  // namespace fdsme
