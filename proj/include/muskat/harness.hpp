#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "muskat/evolution.hpp"
#include "muskat/paradiff.hpp"

namespace muskat {

enum class Preset { Dispersion, Scaling, Convergence, ParalinResidual, RtCrosscheck, Freeplay };

std::string to_string(Preset p);
/// Throws ConfigError for an unknown name.
Preset preset_from_string(const std::string& name);

/// a cos(k x + phase)
struct ModeSpec {
  int k = 1;
  double amplitude = 0.0;
  double phase = 0.0;
  bool operator==(const ModeSpec&) const = default;
};

struct ExperimentConfig {
  Preset preset = Preset::Dispersion;
  std::uint64_t seed = 0;
  std::string output = "out";

  // grid
  std::vector<std::size_t> resolutions{64};
  std::vector<std::size_t> z_intervals{32};  // one entry, or one per resolution
  double period = kTwoPi;

  // physics
  bool two_phase = false;
  double kappa = 1.0;
  double mu_plus = 1.0, mu_minus = 1.0;
  double rho_plus = 0.0, rho_minus = 1.0;
  std::optional<double> depth;      // lower floor; empty = infinite
  std::optional<double> top_depth;  // upper lid (two phase); empty = infinite
  double separation = 0.1;

  // time
  double dt = 0.01;
  double t_end = 0.5;
  Scheme scheme = Scheme::SemiImplicit;
  double epsilon = 0.0;
  int monitor_every = 1;
  double hs_index = 2.0;
  bool nested = false;

  // solver
  double dn_tol = 1e-10;
  double interface_tol = 1e-9;
  double step_tol = 1e-11;
  int max_iter = 500;

  // initial data
  std::vector<ModeSpec> modes;
  std::string initial_file;  // whitespace/comma separated samples of one period
  int random_modes = 0;      // seeded modes k = 1..random_modes
  double random_amplitude = 0.0;

  // preset parameters
  std::vector<int> wavenumbers{1, 2, 4};  // dispersion, convergence
  double amplitude = 1e-3;                // dispersion
  int steps_per_decay = 200;              // dispersion: steps per 1/rate
  int lambda = 2;                         // scaling
  std::vector<double> amplitudes{1e-2, 1e-3, 1e-4};  // paralin_residual

  /// Directory of the parsed file; relative initial files resolve against it.
  std::string base_dir;

  bool operator==(const ExperimentConfig&) const = default;

  std::size_t z_for(std::size_t i) const { return z_intervals.size() == 1 ? z_intervals[0] : z_intervals[i]; }
  /// Throws ConfigError listing every violation.
  void validate() const;
};

/// Defaults adjusted per preset (e.g. a 0.2 cos x initial state for rt_crosscheck).
ExperimentConfig preset_defaults(Preset p);

ExperimentConfig parse_config(const std::filesystem::path& path);
/// Parse from text; `origin` names the source in messages.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<string>",
                                   const std::string& base_dir = "");
std::string serialize_config(const ExperimentConfig& cfg);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

/// Problem description of one resolution point.
Problem make_problem(const ExperimentConfig& cfg, std::size_t z_intervals);
InterfaceState initial_state(const ExperimentConfig& cfg, const TorusGrid& grid);

struct RunReport {
  int exit_code = 0;
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // relative to out_dir
  std::string error;               // empty on success
};

/// Runs the configured preset; ladder points are spread over `threads`
/// workers. Writes summary.csv, monitors.ndjson, plots/*.svg and
/// manifest.json (plus error.json on failure) under cfg.output.
RunReport run_preset(const ExperimentConfig& cfg, int threads = 1);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite behind `muskat check`.
std::vector<CheckResult> run_invariant_checks(int threads = 1);

/// Closed-form values printed by `muskat oracle <name>`; empty if unknown.
std::string oracle_report(const std::string& name, const ExperimentConfig& cfg);
std::vector<std::string> oracle_names();

}  // namespace muskat
