#include <doctest.h>

#include <cmath>

#include "muskat/evolution.hpp"

using namespace muskat;
using doctest::Approx;

TEST_CASE("flat potentials split the jump by viscosity") {
  TorusGrid g(64);
  TwoPhaseConfig cfg;
  cfg.mu_plus = 2.0;
  cfg.mu_minus = 1.0;
  cfg.rho_minus = 1.5;
  cfg.rho_plus = 0.5;
  TwoPhaseSettings s;
  s.dn.z_intervals = 64;
  auto h = SpectralFunction::from_function(g, [](double x) { return std::cos(2 * x); });
  auto sol = solve_potentials(SpectralFunction::zero(g), h, cfg, s);
  // |k| f-/mu- = -|k| (f- - [rho] h)/mu+
  const double c = cfg.jump_rho() * cfg.mu_minus / (cfg.mu_plus + cfg.mu_minus);
  CHECK(l2_norm(sol.f_minus - h * c) / l2_norm(h * c) < 1e-4);
  CHECK(l2_norm(sol.f_plus - (sol.f_minus - h * cfg.jump_rho())) < 1e-10);
  CHECK(sol.certificate.converged);
}

TEST_CASE("interface potentials satisfy flux continuity and RT agreement") {
  TorusGrid g(64);
  TwoPhaseConfig cfg;
  cfg.mu_plus = 2.0;
  TwoPhaseSettings s;
  s.dn.z_intervals = 32;
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x); });
  auto sol = solve_interface_potentials(eta, cfg, s);
  CHECK(sol.flux_residual < 1e-8);
  CHECK(std::abs(sol.f_minus.mean()) < 1e-12);
  CHECK(linf_norm(sol.rt_via_B - sol.rt_via_darcy) < 1e-3);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(sol.rt_via_B[i] > 0.0);
}

TEST_CASE("two-phase configuration checks") {
  TwoPhaseConfig cfg;
  cfg.mu_plus = -1.0;
  CHECK_THROWS(cfg.validate());
  TwoPhaseConfig ok;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.jump_rho() == 1.0);
}

TEST_CASE("linear two-phase rate") {
  TorusGrid g(32);
  TwoPhaseConfig cfg;
  cfg.mu_plus = 3.0;
  cfg.mu_minus = 1.0;
  CHECK(linear_rate_two_phase(2.0, cfg, g) == Approx(2.0 / 4.0));
}

TEST_CASE("flat interface: zero potentials and RT equal to the density jump") {
  TorusGrid g(32);
  TwoPhaseConfig cfg;
  cfg.rho_minus = 2.0;
  cfg.rho_plus = 0.5;
  TwoPhaseSettings s;
  s.dn.z_intervals = 16;
  auto sol = solve_interface_potentials(SpectralFunction::zero(g), cfg, s);
  CHECK(linf_norm(sol.f_minus) < 1e-14);
  CHECK(linf_norm(sol.f_plus) < 1e-14);
  for (std::size_t i = 0; i < g.n(); ++i) {
    CHECK(sol.rt_via_B[i] == Approx(1.5));
    CHECK(sol.rt_via_darcy[i] == Approx(1.5));
  }
  auto [jb, jv] = reduced_coefficients(SpectralFunction::zero(g), sol, cfg);
  CHECK(linf_norm(jb) < 1e-14);
  CHECK(linf_norm(jv) < 1e-14);
}

TEST_CASE("equal viscosities give the closed-form Darcy RT") {
  TorusGrid g(64);
  TwoPhaseConfig cfg;
  TwoPhaseSettings s;
  s.dn.z_intervals = 32;
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x); });
  auto sol = solve_interface_potentials(eta, cfg, s);
  auto de = derivative(eta);
  for (std::size_t i = 0; i < g.n(); ++i)
    CHECK(sol.rt_via_darcy[i] == Approx(1.0 / std::sqrt(1.0 + de[i] * de[i])).epsilon(1e-6));
  auto [jb, jv] = reduced_coefficients(eta, sol, cfg);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(cfg.jump_rho() - jb[i] > 0.0);
}

TEST_CASE("small amplitude potentials follow the linearized split at second order") {
  TorusGrid g(64);
  TwoPhaseConfig cfg;
  cfg.mu_plus = 2.0;
  cfg.mu_minus = 1.0;
  TwoPhaseSettings s;
  s.dn.z_intervals = 64;
  s.tol = 1e-12;
  const double c = cfg.jump_rho() * cfg.mu_minus / (cfg.mu_plus + cfg.mu_minus);
  std::vector<double> err;
  for (double a : {1e-2, 1e-3}) {
    auto eta = SpectralFunction::from_function(g, [a](double x) { return a * std::cos(2 * x); });
    err.push_back(l2_norm(solve_interface_potentials(eta, cfg, s).f_minus - eta * c));
  }
  CHECK(std::log10(err[0] / err[1]) >= 1.8);
}
