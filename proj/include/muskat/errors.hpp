#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace muskat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed arguments (non-finite multipliers, bad sizes, ...).
struct InputError : Error {
  using Error::Error;
};

/// Interface too close to a boundary, or inconsistent domain description.
struct GeometryError : Error {
  GeometryError(const std::string& what, double gap) : Error(what), min_gap(gap) {}
  double min_gap;
};

/// Straightening map lost monotonicity in z.
struct MapValidityError : Error {
  MapValidityError(const std::string& what, double min_dz) : Error(what), min_rho_z(min_dz) {}
  double min_rho_z;
};

/// Iterative solve did not reach tolerance.
struct SolverError : Error {
  SolverError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// Invalid run configuration; carries every violation found.
struct ConfigError : Error {
  explicit ConfigError(std::vector<std::string> v) : Error(join(v)), violations(std::move(v)) {}
  ConfigError(const std::string& msg) : Error(msg), violations{msg} {}
  std::vector<std::string> violations;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& m : v) {
      if (!s.empty()) s += "; ";
      s += m;
    }
    return s;
  }
};

}  // namespace muskat
