#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "muskat/two_phase.hpp"

namespace muskat {

enum class Scheme { SemiImplicit, ExplicitRK4 };

struct EvolutionConfig {
  double kappa = 1.0;  // one phase: rho^- / mu^-
  double dt = 1e-2;
  double t_end = 1.0;
  Scheme scheme = Scheme::SemiImplicit;
  double epsilon = 0.0;  // parabolic regularization -eps d_x^2
  int monitor_every = 1;
  double hs_index = 2.0;  // s of the reported H^s norm
  /// SemiImplicit only: march with the nested formulation (outer Krylov over
  /// DN applications) instead of the single coupled solve.
  bool nested = false;
  double tol = 1e-11;
  int max_iter = 500;
  /// Evaluate B and RT diagnostics at monitor times.
  bool diagnostics = true;

  void validate() const;
};

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct MonitorRecord {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double l2_norm = 0.0;
  double hs_norm = 0.0;
  double min_one_minus_B = kNoValue;  // one phase
  double min_RT = kNoValue;           // two phase, via [B]
  double min_RT_darcy = kNoValue;     // two phase, via the Darcy velocity
  double min_gap = kNoValue;          // to the nearest rigid boundary
  double dissipation_increment = 0.0;  // sum of dt (G eta, eta) since the previous record
  double dissipation_total = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::string halt_reason;  // empty while running
};

struct StepResult {
  InterfaceState eta;
  double dissipation = 0.0;  // dt (G eta_{n+1}, eta_{n+1}) with the frozen geometry
  int iterations = 0;
  double residual = 0.0;
};

/// One step of d_t eta + kappa G(eta) eta = eps d_x^2 eta.
StepResult step_one_phase(const InterfaceState& eta_n, const DomainGeometry& geom, const EvolutionConfig& cfg,
                          const DNSettings& dn = {});

/// One step of d_t eta = -G^-(eta) f^- / mu^-.
StepResult step_two_phase(const InterfaceState& eta_n, const TwoPhaseConfig& tp, const EvolutionConfig& cfg,
                          const TwoPhaseSettings& s = {});

struct Problem {
  bool two_phase = false;
  DomainGeometry geom;  // one phase
  TwoPhaseConfig tp;    // two phase
  EvolutionConfig evo;
  TwoPhaseSettings solver;  // solver.dn is used by both phases
};

struct SimulationResult {
  std::vector<MonitorRecord> records;
  InterfaceState final_state;
  std::string halt_reason;  // "t_end" on normal completion
  /// |eta(T)|^2 + 2 kappa sum dt (G eta, eta) - |eta(0)|^2 (one phase).
  double energy_defect = 0.0;
};

using MonitorSink = std::function<void(const MonitorRecord&)>;
/// Called with (t, eta) after every accepted step.
using StateSink = std::function<void(double, const InterfaceState&)>;

/// Throws GeometryError if the initial state is not separated from the boundaries;
/// later breaches end the run with halt reason "geometry_breach".
SimulationResult run_simulation(const InterfaceState& initial, const Problem& problem, const MonitorSink& sink = {},
                                const StateSink& states = {});

/// Decay rate of a small mode k: kappa |k| tanh(|k| H) (H empty: infinite depth).
double linear_rate_one_phase(double k, double kappa, std::optional<double> depth);
/// [rho] S^- S^+ / (mu^+ S^- + mu^- S^+) with S^+- the flat symbols of the two phases.
double linear_rate_two_phase(double k, const TwoPhaseConfig& tp, const TorusGrid& grid);

/// Rate r of a exp(-r t) fitted by least squares to the log of the |k| Fourier
/// amplitude of a sequence of states.
double fitted_decay_rate(const std::vector<double>& t, const std::vector<InterfaceState>& states, int k);

}  // namespace muskat
