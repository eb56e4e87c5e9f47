#pragma once

#include <utility>

#include "muskat/dirichlet_neumann.hpp"

namespace muskat {

struct TwoPhaseConfig {
  double mu_plus = 1.0, mu_minus = 1.0;
  double rho_plus = 0.0, rho_minus = 1.0;
  DomainGeometry geom;  // bottom: lower phase floor; top: upper phase lid

  double jump_rho() const { return rho_minus - rho_plus; }
  double jump_mu() const { return mu_minus - mu_plus; }
  void validate() const;
};

struct TwoPhaseSettings {
  DNSettings dn;
  double tol = 1e-9;
  int max_iter = 200;
};

struct TwoPhaseSolution {
  SpectralFunction f_minus, f_plus;
  SpectralFunction rt_via_B, rt_via_darcy;
  DNOutput lower, upper;  // G^- f^-, G^+ f^+
  KrylovResult certificate;
  double flux_residual = 0.0;  // |G^+ f^+ / mu^+ - G^- f^- / mu^-| relative to |G^- f^- / mu^-|
};

/// Flat-geometry DN symbol of one phase, used for preconditioning.
double phase_flat_symbol(double k, const Boundary& b, const TorusGrid& g, const DomainGeometry& geom);

/// Potentials f^- (mean zero) and f^+ = f^- - [rho] eta with
/// G^+ f^+ / mu^+ = G^- f^- / mu^-, by PCG on the negated operator
/// G^- / mu^- - G^+ / mu^+ with two DN solves per product.
TwoPhaseSolution solve_interface_potentials(const InterfaceState& eta, const TwoPhaseConfig& cfg,
                                            const TwoPhaseSettings& s = {});

/// Same system with the jump data decoupled from the geometry:
/// f^+ = f^- - [rho] jump_data, domains bounded by eta. rt fields are left zero.
TwoPhaseSolution solve_potentials(const InterfaceState& eta, const SpectralFunction& jump_data,
                                  const TwoPhaseConfig& cfg, const TwoPhaseSettings& s = {});

/// (rt_via_B, rt_via_darcy): the normal pressure gradient jump from the jump
/// of B (trace route) and from the Darcy velocity (flux route).
std::pair<SpectralFunction, SpectralFunction> rayleigh_taylor(const InterfaceState& eta, const TwoPhaseSolution& sol,
                                                              const TwoPhaseConfig& cfg);

/// ([B], [V]) = (B^- - B^+, V^- - V^+).
std::pair<SpectralFunction, SpectralFunction> reduced_coefficients(const InterfaceState& eta,
                                                                   const TwoPhaseSolution& sol,
                                                                   const TwoPhaseConfig& cfg);

}  // namespace muskat
