#include "muskat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace muskat {

void EvolutionConfig::validate() const {
  std::vector<std::string> v;
  if (!(kappa > 0.0)) v.push_back("kappa must be positive");
  if (!(dt > 0.0)) v.push_back("dt must be positive");
  if (!(t_end > 0.0)) v.push_back("t_end must be positive");
  if (!(epsilon >= 0.0)) v.push_back("epsilon must be nonnegative");
  if (monitor_every < 1) v.push_back("monitor_every must be >= 1");
  if (!(tol > 0.0) || max_iter < 1) v.push_back("solver tolerance and iteration cap must be positive");
  if (!v.empty()) throw ConfigError(v);
}

namespace {

std::vector<double> extend_rows(const SpectralFunction& f, std::size_t rows) {
  std::vector<double> v(rows * f.size());
  for (std::size_t j = 0; j < rows; ++j) std::copy(f.values().begin(), f.values().end(), v.begin() + j * f.size());
  return v;
}

SpectralFunction top_row(const Vec& x, std::size_t offset, const TorusGrid& g) {
  return SpectralFunction::from_values(g, std::vector<double>(x.begin() + static_cast<long>(offset),
                                                              x.begin() + static_cast<long>(offset + g.n())));
}

SpectralFunction mean_free(const SpectralFunction& u) { return u - SpectralFunction::constant(u.grid(), u.mean()); }

void require(const KrylovResult& r, const char* what) {
  if (!r.converged) throw SolverError(std::string(what) + " stalled at " + std::to_string(r.relative_residual), r.history);
}

double lower_flat(double k, const DomainGeometry& geom, const TorusGrid& g) {
  return phase_flat_symbol(k, geom.bottom, g, geom);
}

StepResult one_phase_coupled(const InterfaceState& eta_n, const DomainGeometry& geom, const EvolutionConfig& cfg,
                             const DNSettings& dn) {
  const auto& g = eta_n.grid();
  const auto map = build_map(eta_n, geom, dn);
  const StripOperator op(map);
  // Minimizer of a(v,v)/2 + |v_top - eta_n|^2 / (2 kappa dt) + eps |d_x v_top|^2 / (2 kappa).
  const double c = 1.0 / (cfg.kappa * cfg.dt), e = cfg.epsilon / cfg.kappa;
  const CoupledSystem sys({StripBlock{&op, 1.0, false}},
                          [c, e](double k) { return std::vector<double>{c + e * k * k}; }, false);
  Vec b(sys.size(), 0.0);
  const std::size_t top = sys.top_offset(0);
  for (std::size_t i = 0; i < g.n(); ++i) b[top + i] = c * eta_n[i];
  Vec x = extend_rows(eta_n, op.rows());
  const auto res = sys.solve(b, x, cfg.tol, cfg.max_iter);
  require(res, "implicit one-phase step");
  auto eta = top_row(x, top, g);
  Vec Kx(x.size());
  op.apply(x.data(), Kx.data());
  const auto flux = top_row(Kx, top, g);
  return StepResult{eta, cfg.dt * inner_product(flux, eta), res.iterations, res.relative_residual};
}

StepResult one_phase_nested(const InterfaceState& eta_n, const DomainGeometry& geom, const EvolutionConfig& cfg,
                            const DNSettings& dn) {
  const auto& g = eta_n.grid();
  auto to_fn = [&](const Vec& v) { return SpectralFunction::from_values(g, v); };
  auto apply = [&](const Vec& in, Vec& out) {
    const auto u = to_fn(in);
    const auto Gu = dn_apply(eta_n, u, geom, Side::Lower, dn).g;
    out = (u + Gu * (cfg.dt * cfg.kappa) - derivative(u, 2) * (cfg.dt * cfg.epsilon)).values();
  };
  auto precond = [&](const Vec& in, Vec& out) {
    out = apply_multiplier(to_fn(in), [&](double k) -> cplx {
            return 1.0 / (1.0 + cfg.dt * cfg.kappa * lower_flat(k, geom, g) + cfg.dt * cfg.epsilon * k * k);
          }).values();
  };
  Vec x = eta_n.values();
  const auto res = pcg(apply, precond, [](Vec&) {}, eta_n.values(), x, cfg.tol, cfg.max_iter);
  require(res, "nested one-phase step");
  auto eta = to_fn(x);
  const auto G = dn_apply(eta_n, eta, geom, Side::Lower, dn).g;
  return StepResult{eta, cfg.dt * inner_product(G, eta), res.iterations, res.relative_residual};
}

StepResult two_phase_coupled(const InterfaceState& eta_n, const TwoPhaseConfig& tp, const EvolutionConfig& cfg,
                             const DNSettings& dn) {
  const auto& g = eta_n.grid();
  const double jr = tp.jump_rho();
  const auto map_m = build_map(eta_n, tp.geom, dn);
  const auto map_p = build_map(-eta_n, reflected_upper(tp.geom), dn);
  const StripOperator op_m(map_m), op_p(map_p);
  // Minimizer of a^-(v^-)/(2 mu^-) + a^+(v^+)/(2 mu^+)
  //   + |v^-_top - v^+_top - [rho] eta_n|^2 / (2 [rho] dt), mean of v^-_top fixed.
  const double c = 1.0 / (jr * cfg.dt);
  const CoupledSystem sys({StripBlock{&op_m, 1.0 / tp.mu_minus, false}, StripBlock{&op_p, 1.0 / tp.mu_plus, false}},
                          [c](double) { return std::vector<double>{c, -c, -c, c}; }, true);
  Vec b(sys.size(), 0.0);
  const std::size_t tm = sys.top_offset(0), tpo = sys.top_offset(1);
  for (std::size_t i = 0; i < g.n(); ++i) {
    b[tm + i] = eta_n[i] / cfg.dt;
    b[tpo + i] = -eta_n[i] / cfg.dt;
  }
  const auto fm0 = mean_free(eta_n * (jr * tp.mu_minus / (tp.mu_plus + tp.mu_minus)));
  const auto fp0 = fm0 - eta_n * jr;
  Vec x = extend_rows(fm0, op_m.rows());
  const auto xp = extend_rows(fp0, op_p.rows());
  x.insert(x.end(), xp.begin(), xp.end());
  const auto res = sys.solve(b, x, cfg.tol, cfg.max_iter);
  require(res, "implicit two-phase step");
  const auto vm = top_row(x, tm, g), vp = top_row(x, tpo, g);
  auto eta = (vm - vp) * (1.0 / jr);
  Vec Kx(op_m.size());
  op_m.apply(x.data(), Kx.data());
  const auto q = top_row(Kx, op_m.size() - g.n(), g) * (1.0 / tp.mu_minus);
  return StepResult{eta, cfg.dt * inner_product(q, eta), res.iterations, res.relative_residual};
}

StepResult two_phase_nested(const InterfaceState& eta_n, const TwoPhaseConfig& tp, const EvolutionConfig& cfg,
                            const TwoPhaseSettings& s) {
  const auto& g = eta_n.grid();
  const double jr = tp.jump_rho();
  auto to_fn = [&](const Vec& v) { return SpectralFunction::from_values(g, v); };
  // zeta -> zeta + dt G^- f^-[zeta] / mu^-, geometry frozen at eta_n.
  auto apply = [&](const Vec& in, Vec& out) {
    const auto z = to_fn(in);
    const auto sol = solve_potentials(eta_n, z, tp, s);
    out = (z + sol.lower.g * (cfg.dt / tp.mu_minus)).values();
  };
  auto precond = [&](const Vec& in, Vec& out) {
    out = apply_multiplier(to_fn(in), [&](double k) -> cplx {
            const double a = phase_flat_symbol(k, tp.geom.bottom, g, tp.geom) / tp.mu_minus;
            const double cc = phase_flat_symbol(k, tp.geom.top, g, tp.geom) / tp.mu_plus;
            const double par = (a + cc) > 0.0 ? a * cc / (a + cc) : 0.0;
            return 1.0 / (1.0 + cfg.dt * jr * par);
          }).values();
  };
  Vec x = eta_n.values();
  const auto res = pcg(apply, precond, [](Vec&) {}, eta_n.values(), x, cfg.tol, cfg.max_iter);
  require(res, "nested two-phase step");
  auto eta = to_fn(x);
  const auto q = solve_potentials(eta_n, eta, tp, s).lower.g * (1.0 / tp.mu_minus);
  return StepResult{eta, cfg.dt * inner_product(q, eta), res.iterations, res.relative_residual};
}

void check_cfl(const EvolutionConfig& cfg, double rate, const TorusGrid& g) {
  const double km = g.k_max();
  const double limit = 0.5 / (rate * km + cfg.epsilon * km * km);
  if (cfg.dt > limit)
    throw ConfigError("explicit step dt = " + std::to_string(cfg.dt) + " exceeds the stability limit " +
                      std::to_string(limit));
}

template <class Rhs>
StepResult rk4(const InterfaceState& eta_n, double dt, Rhs&& F, double diss_weight) {
  const auto k1 = F(eta_n);
  const auto k2 = F(eta_n + k1 * (0.5 * dt));
  const auto k3 = F(eta_n + k2 * (0.5 * dt));
  const auto k4 = F(eta_n + k3 * dt);
  auto eta = eta_n + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
  return StepResult{eta, -dt * diss_weight * inner_product(k1, eta_n), 0, 0.0};
}

}  // namespace

StepResult step_one_phase(const InterfaceState& eta_n, const DomainGeometry& geom, const EvolutionConfig& cfg,
                          const DNSettings& dn) {
  cfg.validate();
  if (cfg.scheme == Scheme::ExplicitRK4) {
    check_cfl(cfg, cfg.kappa, eta_n.grid());
    // The eps part is excluded from the dissipation through G alone.
    return rk4(eta_n, cfg.dt,
               [&](const SpectralFunction& e) {
                 return dn_apply(e, e, geom, Side::Lower, dn).g * (-cfg.kappa) + derivative(e, 2) * cfg.epsilon;
               },
               1.0 / cfg.kappa);
  }
  return cfg.nested ? one_phase_nested(eta_n, geom, cfg, dn) : one_phase_coupled(eta_n, geom, cfg, dn);
}

StepResult step_two_phase(const InterfaceState& eta_n, const TwoPhaseConfig& tp, const EvolutionConfig& cfg,
                          const TwoPhaseSettings& s) {
  cfg.validate();
  tp.validate();
  if (cfg.scheme == Scheme::ExplicitRK4) {
    check_cfl(cfg, tp.jump_rho() / (tp.mu_plus + tp.mu_minus), eta_n.grid());
    return rk4(eta_n, cfg.dt,
               [&](const SpectralFunction& e) {
                 return solve_potentials(e, e, tp, s).lower.g * (-1.0 / tp.mu_minus) +
                        derivative(e, 2) * cfg.epsilon;
               },
               1.0);
  }
  return cfg.nested ? two_phase_nested(eta_n, tp, cfg, s) : two_phase_coupled(eta_n, tp, cfg, s.dn);
}

namespace {

double boundary_gap(const InterfaceState& eta, const DomainGeometry& g, bool upper) {
  const auto& b = upper ? g.top : g.bottom;
  if (b.kind == BoundaryKind::Empty) return kNoValue;
  try {
    return upper ? check_upper_separation(eta, g) : check_separation(eta, g);
  } catch (const GeometryError& e) {
    return e.min_gap;
  }
}

MonitorRecord diagnose(const InterfaceState& eta, const Problem& p, int step, double t, double dt) {
  MonitorRecord r;
  r.step = step;
  r.t = t;
  r.dt = dt;
  r.l2_norm = l2_norm(eta);
  r.hs_norm = sobolev_norm(eta, p.evo.hs_index);
  if (!p.two_phase) {
    r.min_gap = boundary_gap(eta, p.geom, false);
    if (p.evo.diagnostics) {
      const auto out = dn_apply(eta, eta, p.geom, Side::Lower, p.solver.dn);
      r.min_one_minus_B = 1.0 - *std::max_element(out.b_field.values().begin(), out.b_field.values().end());
    }
  } else {
    const double lo = boundary_gap(eta, p.tp.geom, false), hi = boundary_gap(eta, p.tp.geom, true);
    r.min_gap = std::isnan(lo) ? hi : (std::isnan(hi) ? lo : std::min(lo, hi));
    if (p.evo.diagnostics) {
      const auto sol = solve_interface_potentials(eta, p.tp, p.solver);
      r.min_RT = *std::min_element(sol.rt_via_B.values().begin(), sol.rt_via_B.values().end());
      r.min_RT_darcy = *std::min_element(sol.rt_via_darcy.values().begin(), sol.rt_via_darcy.values().end());
    }
  }
  return r;
}

}  // namespace

SimulationResult run_simulation(const InterfaceState& initial, const Problem& problem, const MonitorSink& sink,
                                const StateSink& states) {
  Problem p = problem;
  p.evo.validate();
  if (p.two_phase) p.tp.validate();
  // The initial state must be admissible; only later breaches halt gracefully.
  if (p.two_phase) {
    check_separation(initial, p.tp.geom);
    check_upper_separation(initial, p.tp.geom);
  } else {
    check_separation(initial, p.geom);
  }
  SimulationResult out{{}, initial, "", 0.0};
  auto emit = [&](MonitorRecord r) {
    if (sink) sink(r);
    out.records.push_back(std::move(r));
  };

  InterfaceState eta = initial;
  double t = 0.0, diss_total = 0.0, diss_since = 0.0;
  int step = 0;
  bool halved = false;
  std::string halt;

  auto record = [&](double dt) {
    MonitorRecord r;
    try {
      r = diagnose(eta, p, step, t, dt);
    } catch (const GeometryError& e) {
      r.step = step;
      r.t = t;
      r.l2_norm = l2_norm(eta);
      r.min_gap = e.min_gap;
      halt = "geometry_breach";
    } catch (const SolverError&) {
      r.step = step;
      r.t = t;
      r.l2_norm = l2_norm(eta);
      halt = "solver_stall";
    }
    r.dissipation_increment = diss_since;
    r.dissipation_total = diss_total;
    diss_since = 0.0;
    if (halt.empty() && p.two_phase && !std::isnan(r.min_RT) && !(r.min_RT > 0.0)) halt = "rt_loss";
    return r;
  };

  auto first = record(0.0);
  if (!halt.empty()) first.halt_reason = halt;
  emit(first);

  const double t_tol = 1e-12 * std::max(1.0, p.evo.t_end);
  while (halt.empty() && t < p.evo.t_end - t_tol) {
    EvolutionConfig cfg = p.evo;
    cfg.dt = std::min(p.evo.dt, p.evo.t_end - t);
    std::optional<StepResult> step_out;
    try {
      step_out = p.two_phase ? step_two_phase(eta, p.tp, cfg, p.solver) : step_one_phase(eta, p.geom, cfg, p.solver.dn);
    } catch (const SolverError&) {
      if (halved) {
        halt = "solver_stall";
        break;
      }
      halved = true;
      p.evo.dt *= 0.5;
      continue;
    } catch (const GeometryError&) {
      halt = "geometry_breach";
      break;
    }
    const StepResult& s = *step_out;
    bool finite = true;
    for (double v : s.eta.values()) finite = finite && std::isfinite(v);
    if (!finite) {
      halt = "non_finite";
      break;
    }
    eta = s.eta;
    t += cfg.dt;
    ++step;
    if (states) states(t, eta);
    diss_total += s.dissipation;
    diss_since += s.dissipation;
    const bool last = t >= p.evo.t_end - t_tol;
    if (step % p.evo.monitor_every == 0 || last) {
      auto r = record(cfg.dt);
      r.iterations = s.iterations;
      r.residual = s.residual;
      if (!halt.empty()) r.halt_reason = halt;
      if (last && halt.empty()) r.halt_reason = "t_end";
      emit(r);
    }
  }
  if (halt.empty()) halt = "t_end";
  if (out.records.back().halt_reason.empty()) {
    auto r = record(0.0);
    r.halt_reason = halt;
    emit(r);
  }
  out.halt_reason = halt;
  out.final_state = eta;
  const double w = p.two_phase ? 1.0 : p.evo.kappa;
  const double n0 = l2_norm(initial), n1 = l2_norm(eta);
  out.energy_defect = n1 * n1 + 2.0 * w * diss_total - n0 * n0;
  return out;
}

double linear_rate_one_phase(double k, double kappa, std::optional<double> depth) {
  return kappa * flat_dn_multiplier(k, depth);
}

double linear_rate_two_phase(double k, const TwoPhaseConfig& tp, const TorusGrid& grid) {
  const double sm = phase_flat_symbol(k, tp.geom.bottom, grid, tp.geom);
  const double sp = phase_flat_symbol(k, tp.geom.top, grid, tp.geom);
  const double den = tp.mu_plus * sm + tp.mu_minus * sp;
  return den > 0.0 ? tp.jump_rho() * sm * sp / den : 0.0;
}

double fitted_decay_rate(const std::vector<double>& t, const std::vector<InterfaceState>& states, int k) {
  if (t.size() != states.size() || t.size() < 2) throw InputError("decay fit needs matching samples");
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double y = std::log(std::abs(states[i].coefficient(k)));
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  return -(n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace muskat
