#include <doctest.h>

#include <cmath>

#include "muskat/evolution.hpp"

using namespace muskat;
using doctest::Approx;

TEST_CASE("linear one-phase rate") {
  CHECK(linear_rate_one_phase(3.0, 2.0, std::nullopt) == Approx(6.0));
  CHECK(linear_rate_one_phase(1.0, 1.0, 1.0) == Approx(std::tanh(1.0)));
}

TEST_CASE("semi-implicit step of a small mode is backward Euler") {
  TorusGrid g(32);
  auto eta = SpectralFunction::from_function(g, [](double x) { return 1e-6 * std::cos(2 * x); });
  EvolutionConfig c;
  c.dt = 0.1;
  DNSettings dn;
  dn.z_intervals = 64;
  auto r = step_one_phase(eta, DomainGeometry{}, c, dn);
  CHECK(l2_norm(r.eta - eta * (1.0 / (1.0 + 0.1 * 2.0))) / l2_norm(eta) < 1e-4);
  CHECK(r.dissipation > 0.0);
}

TEST_CASE("fitted decay rate recovers an exponential") {
  TorusGrid g(16);
  std::vector<double> t;
  std::vector<InterfaceState> s;
  for (int n = 0; n <= 10; ++n) {
    t.push_back(0.1 * n);
    const double a = std::exp(-1.7 * 0.1 * n);
    s.push_back(SpectralFunction::from_function(g, [a](double x) { return a * std::cos(3 * x); }));
  }
  CHECK(fitted_decay_rate(t, s, 3) == Approx(1.7));
}

TEST_CASE("run_simulation decreases the L2 norm and keeps B below 1") {
  TorusGrid g(32);
  Problem p;
  p.evo.dt = 0.02;
  p.evo.t_end = 0.2;
  p.evo.monitor_every = 2;
  p.solver.dn.z_intervals = 16;
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x); });
  int seen = 0;
  auto r = run_simulation(eta, p, [&](const MonitorRecord&) { ++seen; });
  CHECK(r.halt_reason == "t_end");
  CHECK(seen == static_cast<int>(r.records.size()));
  CHECK(r.records.size() >= 6);
  for (std::size_t i = 1; i < r.records.size(); ++i) CHECK(r.records[i].l2_norm < r.records[i - 1].l2_norm);
  for (const auto& m : r.records) CHECK(m.min_one_minus_B > 0.0);
  CHECK(std::abs(r.energy_defect) < 1e-2 * l2_norm(eta) * l2_norm(eta));
}

TEST_CASE("inadmissible initial state is an error, not a halt") {
  TorusGrid g(32);
  Problem p;
  p.geom.bottom = Boundary::flat(0.2);
  p.solver.dn.z_intervals = 16;
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.15 * std::cos(x); });
  CHECK_THROWS_AS(run_simulation(eta, p), GeometryError);
}

TEST_CASE("explicit RK4 agrees with the semi-implicit scheme for small steps") {
  TorusGrid g(32);
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.1 * std::cos(x); });
  EvolutionConfig a;
  a.dt = 1e-3;
  EvolutionConfig b = a;
  b.scheme = Scheme::ExplicitRK4;
  DNSettings dn;
  dn.z_intervals = 16;
  auto ea = eta, eb = eta;
  for (int n = 0; n < 5; ++n) {
    ea = step_one_phase(ea, DomainGeometry{}, a, dn).eta;
    eb = step_one_phase(eb, DomainGeometry{}, b, dn).eta;
  }
  CHECK(l2_norm(ea - eb) / l2_norm(eb) < 1e-4);
}

TEST_CASE("invalid evolution settings are rejected") {
  EvolutionConfig c;
  c.dt = 0.0;
  CHECK_THROWS(c.validate());
  c.dt = 0.1;
  c.epsilon = -1.0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("zero is a fixed point of both steppers") {
  TorusGrid g(32);
  auto zero = SpectralFunction::zero(g);
  EvolutionConfig c;
  c.dt = 0.05;
  DNSettings dn;
  dn.z_intervals = 16;
  CHECK(linf_norm(step_one_phase(zero, DomainGeometry{}, c, dn).eta) == 0.0);
  TwoPhaseSettings s;
  s.dn.z_intervals = 16;
  CHECK(linf_norm(step_two_phase(zero, TwoPhaseConfig{}, c, s).eta) < 1e-15);

  Problem p;
  p.evo.dt = 0.01;
  p.evo.t_end = 1.0;
  p.solver.dn.z_intervals = 16;
  auto r = run_simulation(zero, p);
  CHECK(r.halt_reason == "t_end");
  CHECK(r.records.size() == 101);
  for (const auto& m : r.records) {
    CHECK(m.l2_norm == 0.0);
    CHECK(m.min_one_minus_B == Approx(1.0));
  }
}

TEST_CASE("explicit steps beyond the stability limit are a configuration error") {
  TorusGrid g(64);
  EvolutionConfig c;
  c.scheme = Scheme::ExplicitRK4;
  c.dt = 0.1;
  CHECK_THROWS_AS(step_one_phase(SpectralFunction::zero(g), DomainGeometry{}, c), ConfigError);
}

TEST_CASE("energy balance defect converges at first order in dt") {
  TorusGrid g(32);
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x) + 0.1 * std::cos(2 * x); });
  std::vector<double> d;
  for (double dt : {0.04, 0.02, 0.01}) {
    Problem p;
    p.evo.dt = dt;
    p.evo.t_end = 0.4;
    p.evo.diagnostics = false;
    p.solver.dn.z_intervals = 16;
    d.push_back(std::abs(run_simulation(eta, p).energy_defect));
  }
  CHECK(std::log2(d[0] / d[1]) >= 0.9);
  CHECK(std::log2(d[1] / d[2]) >= 0.9);
}

TEST_CASE("equal viscosities keep RT above the slope bound") {
  TorusGrid g(32);
  Problem p;
  p.two_phase = true;
  p.evo.dt = 0.02;
  p.evo.t_end = 0.2;
  p.solver.dn.z_intervals = 16;
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.25 * std::cos(x); });
  auto de = derivative(eta);
  double slope = 0.0;
  for (double v : de.values()) slope = std::max(slope, std::abs(v));
  auto r = run_simulation(eta, p);
  for (const auto& m : r.records) CHECK(m.min_RT >= 1.0 / std::sqrt(1.0 + slope * slope) - 1e-6);
}
