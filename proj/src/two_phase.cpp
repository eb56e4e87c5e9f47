#include "muskat/two_phase.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace muskat {

void TwoPhaseConfig::validate() const {
  std::vector<std::string> v;
  if (!(mu_plus > 0.0) || !(mu_minus > 0.0)) v.push_back("viscosities must be positive");
  if (!(jump_rho() > 0.0)) v.push_back("density jump rho_minus - rho_plus must be positive");
  if (!v.empty()) throw ConfigError(v);
}

double phase_flat_symbol(double k, const Boundary& b, const TorusGrid& g, const DomainGeometry& geom) {
  switch (b.kind) {
    case BoundaryKind::Empty:
      return flat_dn_multiplier(k, truncation_depth(geom, g));
    case BoundaryKind::FlatDepth:
      return flat_dn_multiplier(k, b.depth);
    case BoundaryKind::Sampled:
      return flat_dn_multiplier(k, std::abs(b.level->mean()));
  }
  return std::abs(k);
}

namespace {

SpectralFunction mean_free(const SpectralFunction& u) { return u - SpectralFunction::constant(u.grid(), u.mean()); }

}  // namespace

TwoPhaseSolution solve_interface_potentials(const InterfaceState& eta, const TwoPhaseConfig& cfg,
                                            const TwoPhaseSettings& s) {
  auto sol = solve_potentials(eta, eta, cfg, s);
  auto [rb, rd] = rayleigh_taylor(eta, sol, cfg);
  sol.rt_via_B = std::move(rb);
  sol.rt_via_darcy = std::move(rd);
  return sol;
}

TwoPhaseSolution solve_potentials(const InterfaceState& eta, const SpectralFunction& jump_data,
                                  const TwoPhaseConfig& cfg, const TwoPhaseSettings& s) {
  cfg.validate();
  check_separation(eta, cfg.geom);
  check_upper_separation(eta, cfg.geom);
  const auto& grid = eta.grid();
  const double jr = cfg.jump_rho();
  const auto to_fn = [&](const Vec& v) { return SpectralFunction::from_values(grid, v); };

  // Negated operator f -> G^- f / mu^- - G^+ f / mu^+, symmetric and
  // nonnegative; restricted to dealiased mean-free functions.
  auto project = [&](Vec& v) { v = mean_free(dealias(to_fn(v))).values(); };
  auto apply = [&](const Vec& in, Vec& out) {
    const auto f = to_fn(in);
    const auto gm = dn_apply(eta, f, cfg.geom, Side::Lower, s.dn).g;
    const auto gp = dn_apply(eta, f, cfg.geom, Side::Upper, s.dn).g;
    out = (gm * (1.0 / cfg.mu_minus) - gp * (1.0 / cfg.mu_plus)).values();
  };
  auto precond = [&](const Vec& in, Vec& out) {
    const auto u = apply_multiplier(to_fn(in), [&](double k) -> cplx {
      if (k == 0.0) return 0.0;
      const double sym = phase_flat_symbol(k, cfg.geom.top, grid, cfg.geom) / cfg.mu_plus +
                         phase_flat_symbol(k, cfg.geom.bottom, grid, cfg.geom) / cfg.mu_minus;
      return 1.0 / sym;
    });
    out = u.values();
  };

  // Right-hand side: -(1/mu^+) G^+([rho] eta).
  const auto jump = jump_data * jr;
  const auto rhs_fn = dn_apply(eta, jump, cfg.geom, Side::Upper, s.dn).g * (-1.0 / cfg.mu_plus);
  const Vec rhs = rhs_fn.values();
  // Initial guess from the flat linearization.
  Vec x = mean_free(dealias(jump_data * (jr * cfg.mu_minus / (cfg.mu_plus + cfg.mu_minus)))).values();
  const auto cert = pcg(apply, precond, project, rhs, x, s.tol, s.max_iter);
  if (!cert.converged)
    throw SolverError("interface potential solve stalled at " + std::to_string(cert.relative_residual), cert.history);

  auto fm = to_fn(x);
  auto fp = fm - jump;
  auto lower = dn_apply(eta, fm, cfg.geom, Side::Lower, s.dn);
  auto upper = dn_apply(eta, fp, cfg.geom, Side::Upper, s.dn);
  const auto flux_m = lower.g * (1.0 / cfg.mu_minus);
  const auto defect = upper.g * (1.0 / cfg.mu_plus) - flux_m;
  const double scale = std::max(l2_norm(flux_m), l2_norm(rhs_fn));

  return TwoPhaseSolution{std::move(fm), std::move(fp), SpectralFunction::zero(grid), SpectralFunction::zero(grid),
                          std::move(lower), std::move(upper), cert, scale > 0.0 ? l2_norm(defect) / scale : 0.0};
}

std::pair<SpectralFunction, SpectralFunction> rayleigh_taylor(const InterfaceState& eta, const TwoPhaseSolution& sol,
                                                              const TwoPhaseConfig& cfg) {
  const auto& grid = eta.grid();
  const auto ex = derivative(eta);
  // B from the chain-rule traces: an independent discretization of d_y phi.
  const auto Bm = compute_b_v(dealias(sol.f_minus), eta, sol.lower.g_trace).first;
  const auto Bp = compute_b_v(dealias(sol.f_plus), eta, sol.upper.g_trace).first;
  const double jr = cfg.jump_rho(), jm = cfg.jump_mu();
  std::vector<double> rb(grid.n()), rd(grid.n());
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const double s = std::sqrt(1.0 + ex[i] * ex[i]);
    rb[i] = s * (jr - (Bm[i] - Bp[i]));
    // sqrt(1+eta'^2) u.n = -G^- f^- / mu^-
    rd[i] = (jr - jm * sol.lower.g[i] / cfg.mu_minus) / s;
  }
  return {SpectralFunction::from_values(grid, std::move(rb)), SpectralFunction::from_values(grid, std::move(rd))};
}

std::pair<SpectralFunction, SpectralFunction> reduced_coefficients(const InterfaceState&, const TwoPhaseSolution& sol,
                                                                   const TwoPhaseConfig&) {
  return {sol.lower.b_field - sol.upper.b_field, sol.lower.v_field - sol.upper.v_field};
}

}  // namespace muskat
