#include "muskat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <numbers>
#include <thread>

#include <unistd.h>

#include "json.hpp"
#include "muskat/svg.hpp"

#ifndef MUSKAT_VERSION
#define MUSKAT_VERSION "0.0.0"
#endif

namespace muskat {

namespace fs = std::filesystem;
using json = nlohmann::json;

Problem make_problem(const ExperimentConfig& cfg, std::size_t z_intervals) {
  Problem p;
  p.two_phase = cfg.two_phase;
  p.geom.bottom = cfg.depth ? Boundary::flat(*cfg.depth) : Boundary::empty();
  p.geom.h = cfg.separation;
  p.tp.geom = p.geom;
  p.tp.geom.top = cfg.top_depth ? Boundary::flat(*cfg.top_depth) : Boundary::empty();
  p.tp.mu_plus = cfg.mu_plus;
  p.tp.mu_minus = cfg.mu_minus;
  p.tp.rho_plus = cfg.rho_plus;
  p.tp.rho_minus = cfg.rho_minus;
  p.evo.kappa = cfg.kappa;
  p.evo.dt = cfg.dt;
  p.evo.t_end = cfg.t_end;
  p.evo.scheme = cfg.scheme;
  p.evo.epsilon = cfg.epsilon;
  p.evo.monitor_every = cfg.monitor_every;
  p.evo.hs_index = cfg.hs_index;
  p.evo.nested = cfg.nested;
  p.evo.tol = cfg.step_tol;
  p.evo.max_iter = cfg.max_iter;
  p.solver.dn.z_intervals = z_intervals;
  p.solver.dn.tol = cfg.dn_tol;
  p.solver.dn.max_iter = cfg.max_iter;
  p.solver.tol = cfg.interface_tol;
  p.solver.max_iter = cfg.max_iter;
  return p;
}

namespace {

std::vector<double> read_samples(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read initial file " + path.string());
  std::vector<double> v;
  std::string tok;
  while (f >> tok) {
    std::replace(tok.begin(), tok.end(), ',', ' ');
    std::istringstream ss(tok);
    double x;
    while (ss >> x) v.push_back(x);
  }
  return v;
}

}  // namespace

InterfaceState initial_state(const ExperimentConfig& cfg, const TorusGrid& grid) {
  const double ku = grid.k_unit();
  std::vector<double> v(grid.n(), 0.0);
  for (const auto& m : cfg.modes)
    for (std::size_t i = 0; i < grid.n(); ++i) v[i] += m.amplitude * std::cos(m.k * ku * grid.x(i) + m.phase);
  if (cfg.random_modes > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, kTwoPi);
    for (int k = 1; k <= cfg.random_modes; ++k) {
      const double a = cfg.random_amplitude * amp(rng) / (static_cast<double>(k) * k);
      const double ph = phase(rng);
      for (std::size_t i = 0; i < grid.n(); ++i) v[i] += a * std::cos(k * ku * grid.x(i) + ph);
    }
  }
  auto eta = SpectralFunction::from_values(grid, std::move(v));
  if (!cfg.initial_file.empty()) {
    fs::path p(cfg.initial_file);
    if (p.is_relative() && !cfg.base_dir.empty()) p = fs::path(cfg.base_dir) / p;
    const auto s = read_samples(p);
    const std::size_t nf = s.size();
    if (nf < 8 || (nf & (nf - 1)) != 0) throw ConfigError("initial file needs a power-of-two sample count >= 8");
    const auto src = SpectralFunction::from_values(TorusGrid(nf, grid.period()), s);
    // Spectral resampling; both Nyquist modes are dropped.
    std::vector<cplx> c(grid.n_half(), cplx(0.0));
    const std::size_t q_max = std::min(nf, grid.n()) / 2;
    for (std::size_t q = 0; q < q_max; ++q) c[q] = src.coefficients()[q];
    eta = eta + SpectralFunction::from_coefficients(grid, std::move(c));
  }
  return eta;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char b[40];
  std::snprintf(b, sizeof b, "%.10e", v);
  return b;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
      s += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return s;
  }
};

struct PointOutput {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> monitors;
  std::vector<svg::Series> series;  // preset specific
  std::vector<svg::Series> series2;
  std::vector<std::vector<std::string>> extra_rows;
  std::vector<double> values;  // preset specific scalars for post-processing
};

struct Outputs {
  Table summary;
  std::vector<std::string> monitors;
  std::vector<std::pair<std::string, svg::Plot>> plots;
  std::vector<std::pair<std::string, Table>> extra_csv;
};

/// Runs f(0..n-1) on up to `threads` workers; results and the first error are
/// reported in index order whatever the scheduling.
std::vector<PointOutput> parallel_map(std::size_t n, int threads, const std::function<PointOutput(std::size_t)>& f) {
  std::vector<PointOutput> out(n);
  std::vector<std::exception_ptr> err(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

json monitor_json(const MonitorRecord& r) {
  return {{"step", r.step},
          {"t", r.t},
          {"dt", r.dt},
          {"l2_norm", r.l2_norm},
          {"hs_norm", r.hs_norm},
          {"min_one_minus_B", r.min_one_minus_B},
          {"min_RT", r.min_RT},
          {"min_RT_darcy", r.min_RT_darcy},
          {"min_gap", r.min_gap},
          {"dissipation_increment", r.dissipation_increment},
          {"dissipation_total", r.dissipation_total},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"halt_reason", r.halt_reason}};
}

MonitorSink collect(std::vector<std::string>& lines, json tag, Clock::time_point t0) {
  return [&lines, tag = std::move(tag), t0](const MonitorRecord& r) {
    json j = tag;
    j.update(monitor_json(r));
    j["elapsed_s"] = seconds_since(t0);
    lines.push_back(j.dump());
  };
}

/// Least-squares slope of log y against log x over finite positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++n;
  }
  if (n < 2) return std::nan("");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string depth_label(const std::optional<double>& d) { return d ? num(*d) : "infinite"; }

// ---------------------------------------------------------------- presets

void preset_dispersion(const ExperimentConfig& cfg, int threads, Outputs& o) {
  const std::size_t nk = cfg.wavenumbers.size();
  auto res = parallel_map(cfg.resolutions.size() * nk, threads, [&](std::size_t idx) {
    const std::size_t i = idx / nk;
    const int k = cfg.wavenumbers[idx % nk];
    const auto t0 = Clock::now();
    const TorusGrid g(cfg.resolutions[i], cfg.period);
    Problem p = make_problem(cfg, cfg.z_for(i));
    const double kk = k * g.k_unit();
    const double theory =
        cfg.two_phase ? linear_rate_two_phase(kk, p.tp, g) : linear_rate_one_phase(kk, cfg.kappa, cfg.depth);
    p.evo.dt = 1.0 / (theory * cfg.steps_per_decay);
    p.evo.t_end = 1.0 / theory;
    const auto eta0 = SpectralFunction::from_function(g, [&](double x) { return cfg.amplitude * std::cos(kk * x); });
    std::vector<double> ts{0.0};
    std::vector<InterfaceState> states{eta0};
    PointOutput out;
    const auto sim = run_simulation(eta0, p, collect(out.monitors, {{"point", idx}, {"N", g.n()}, {"k", k}}, t0),
                                    [&](double t, const InterfaceState& e) {
                                      ts.push_back(t);
                                      states.push_back(e);
                                    });
    const double measured = fitted_decay_rate(ts, states, k);
    out.rows.push_back({std::to_string(g.n()), std::to_string(cfg.z_for(i)), std::to_string(k),
                        depth_label(cfg.depth), cfg.two_phase ? "two" : "one", num(measured), num(theory),
                        num(measured / theory), std::to_string(ts.size() - 1), sim.halt_reason});
    if (i == 0) {
      svg::Series m{"k=" + std::to_string(k), {}, {}, false}, th{"k=" + std::to_string(k) + " linear", {}, {}, false};
      for (std::size_t s = 0; s < ts.size(); ++s) {
        m.x.push_back(ts[s]);
        m.y.push_back(std::abs(states[s].coefficient(k)) / std::abs(eta0.coefficient(k)));
        th.x.push_back(ts[s]);
        th.y.push_back(std::exp(-theory * ts[s]));
      }
      out.series = {m, th};
    }
    return out;
  });
  o.summary.header = {"N", "M", "k", "depth", "phases", "rate_measured", "rate_theory", "ratio", "steps", "halt"};
  svg::Plot plot{"Modal decay", "t", "|c_k(t)| / |c_k(0)|", false, true, {}};
  for (auto& r : res) {
    for (auto& row : r.rows) o.summary.rows.push_back(row);
    for (auto& m : r.monitors) o.monitors.push_back(m);
    for (auto& s : r.series) plot.series.push_back(s);
  }
  o.plots.push_back({"decay", plot});
}

void preset_scaling(const ExperimentConfig& cfg, int threads, Outputs& o) {
  const int lam = cfg.lambda;
  auto res = parallel_map(cfg.resolutions.size(), threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const TorusGrid g(cfg.resolutions[i], cfg.period);
    const std::size_t n = g.n();
    const auto eta0 = initial_state(cfg, g);
    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j) sv[j] = eta0[(lam * j) % n] / lam;
    const auto eta_s = SpectralFunction::from_values(g, sv);

    Problem ps = make_problem(cfg, cfg.z_for(i));
    Problem pb = ps;
    pb.evo.dt = ps.evo.dt * lam;
    pb.evo.t_end = ps.evo.t_end * lam;
    PointOutput out;
    std::vector<InterfaceState> sb, ss;
    std::vector<double> ts;
    const auto rb = run_simulation(eta0, pb, collect(out.monitors, {{"point", i}, {"N", n}, {"run", "base"}}, t0),
                                   [&](double, const InterfaceState& e) { sb.push_back(e); });
    const auto rs = run_simulation(eta_s, ps, collect(out.monitors, {{"point", i}, {"N", n}, {"run", "scaled"}}, t0),
                                   [&](double t, const InterfaceState& e) {
                                     ss.push_back(e);
                                     ts.push_back(t);
                                   });
    double worst = 0.0, last = std::nan("");
    svg::Series s{"N=" + std::to_string(n), {}, {}, false};
    for (std::size_t k = 0; k < std::min(sb.size(), ss.size()); ++k) {
      for (std::size_t j = 0; j < n; ++j) sv[j] = sb[k][(lam * j) % n] / lam;
      const double d = l2_norm(ss[k] - SpectralFunction::from_values(g, sv)) / l2_norm(ss[k]);
      worst = std::max(worst, d);
      last = d;
      s.x.push_back(ts[k]);
      s.y.push_back(d);
    }
    out.rows.push_back({std::to_string(n), std::to_string(cfg.z_for(i)), std::to_string(lam), depth_label(cfg.depth),
                        std::to_string(std::min(sb.size(), ss.size())), num(worst), num(last), rb.halt_reason,
                        rs.halt_reason});
    out.series = {s};
    return out;
  });
  o.summary.header = {"N", "M", "lambda", "depth", "steps", "max_rel_discrepancy", "final_rel_discrepancy",
                      "halt_base", "halt_scaled"};
  svg::Plot plot{"Scaling discrepancy", "t (scaled run)", "relative L2 discrepancy", false, true, {}};
  for (auto& r : res) {
    for (auto& row : r.rows) o.summary.rows.push_back(row);
    for (auto& m : r.monitors) o.monitors.push_back(m);
    for (auto& s : r.series) plot.series.push_back(s);
  }
  o.plots.push_back({"scaling", plot});
}

void preset_convergence(const ExperimentConfig& cfg, int threads, Outputs& o) {
  const std::size_t nm = cfg.z_intervals.size(), nk = cfg.wavenumbers.size();
  auto res = parallel_map(cfg.resolutions.size() * nm, threads, [&](std::size_t idx) {
    const auto t0 = Clock::now();
    const std::size_t i = idx / nm, M = cfg.z_intervals[idx % nm];
    const TorusGrid g(cfg.resolutions[i], cfg.period);
    const Problem p = make_problem(cfg, M);
    const auto eta = SpectralFunction::zero(g);
    PointOutput out;
    for (int k : cfg.wavenumbers) {
      const double kk = k * g.k_unit();
      const auto f = SpectralFunction::from_function(g, [&](double x) { return std::cos(kk * x); });
      const auto r = dn_apply(eta, f, p.geom, Side::Lower, p.solver.dn);
      const auto ex = f * flat_dn_multiplier(kk, cfg.depth);
      const double ef = l2_norm(r.g - ex) / l2_norm(ex), et = l2_norm(r.g_trace - ex) / l2_norm(ex);
      out.values.push_back(ef);
      out.values.push_back(et);
      out.rows.push_back({std::to_string(g.n()), std::to_string(M), std::to_string(k), depth_label(cfg.depth), num(ef),
                          num(et), std::to_string(r.iterations)});
      json j = {{"point", idx}, {"N", g.n()},      {"M", M},           {"k", k}, {"error_flux", ef},
                {"error_trace", et}, {"iterations", r.iterations}, {"residual", r.residual},
                {"elapsed_s", seconds_since(t0)}};
      out.monitors.push_back(j.dump());
    }
    return out;
  });
  o.summary.header = {"N", "M", "k", "depth", "error_flux", "error_trace", "iterations", "slope_flux", "slope_trace"};
  svg::Plot plot{"Flat DN oracle under z refinement", "M", "relative L2 error", true, true, {}};
  for (std::size_t i = 0; i < cfg.resolutions.size(); ++i)
    for (std::size_t q = 0; q < nk; ++q) {
      std::vector<double> ms, ef, et;
      for (std::size_t m = 0; m < nm; ++m) {
        const auto& r = res[i * nm + m];
        ms.push_back(static_cast<double>(cfg.z_intervals[m]));
        ef.push_back(r.values[2 * q]);
        et.push_back(r.values[2 * q + 1]);
      }
      // error ~ M^{-p}: slope column reports p
      const double sf = -loglog_slope(ms, ef), st = -loglog_slope(ms, et);
      for (std::size_t m = 0; m < nm; ++m) {
        auto row = res[i * nm + m].rows[q];
        row.push_back(num(sf));
        row.push_back(num(st));
        o.summary.rows.push_back(row);
      }
      if (i == 0) plot.series.push_back({"k=" + std::to_string(cfg.wavenumbers[q]), ms, ef, true});
    }
  for (auto& r : res)
    for (auto& m : r.monitors) o.monitors.push_back(m);
  o.plots.push_back({"convergence", plot});
}

void preset_paralin(const ExperimentConfig& cfg, int threads, Outputs& o) {
  auto res = parallel_map(cfg.resolutions.size(), threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const TorusGrid g(cfg.resolutions[i], cfg.period);
    const Problem p = make_problem(cfg, cfg.z_for(i));
    const auto& geom = p.geom;
    const auto& dn = p.solver.dn;
    PointOutput out;
    // flat interface: the main term is the whole operator
    const auto f_flat = SpectralFunction::from_function(g, [&](double x) {
      return std::cos(3 * g.k_unit() * x) + 0.5 * std::sin(5 * g.k_unit() * x);
    });
    const auto flat = paralinearize_dn(SpectralFunction::zero(g), f_flat, geom, dn);
    const double flat_res = l2_norm(flat.residual);
    std::vector<double> amps, resid, dev;
    for (double a : cfg.amplitudes) {
      const auto eta = SpectralFunction::from_function(g, [&](double x) { return a * std::cos(g.k_unit() * x); });
      const auto pl = paralinearize_dn(eta, eta, geom, dn);
      amps.push_back(a);
      resid.push_back(l2_norm(pl.residual));
      dev.push_back(l2_norm(pl.dn.g - abs_derivative(eta)));
      json j = {{"point", i},           {"N", g.n()},           {"amplitude", a},
                {"residual_l2", resid.back()}, {"dn_deviation", dev.back()}, {"iterations", pl.dn.iterations},
                {"elapsed_s", seconds_since(t0)}};
      out.monitors.push_back(j.dump());
    }
    const double s_res = loglog_slope(amps, resid), s_dev = loglog_slope(amps, dev);
    for (std::size_t q = 0; q < amps.size(); ++q)
      out.rows.push_back({std::to_string(g.n()), std::to_string(cfg.z_for(i)), num(amps[q]), num(resid[q]),
                          num(dev[q]), num(s_res), num(s_dev), num(flat_res)});
    out.series = {{"N=" + std::to_string(g.n()) + " residual", amps, resid, true},
                  {"N=" + std::to_string(g.n()) + " |G eta - |D| eta|", amps, dev, true}};

    const auto eta = initial_state(cfg, g);
    const auto pl = paralinearize_dn(eta, eta, geom, dn);
    const double band = (2.0 / 3.0) * g.k_max();
    svg::Series br{"N=" + std::to_string(g.n()), {}, {}, true};
    for (const auto& b : pl.blocks) {
      const bool resolved = std::ldexp(1.0, b.j) <= band;
      out.extra_rows.push_back({std::to_string(g.n()), std::to_string(b.j), num(b.residual_norm), num(b.g_norm),
                                num(b.ratio), resolved ? "1" : "0"});
      if (resolved) {
        br.x.push_back(b.j);
        br.y.push_back(b.ratio);
      }
    }
    out.series2 = {br};
    return out;
  });
  o.summary.header = {"N", "M", "amplitude", "residual_l2", "dn_deviation", "residual_slope", "dn_deviation_slope",
                      "flat_residual"};
  Table blocks{{"N", "j", "residual_norm", "g_norm", "ratio", "resolved"}, {}};
  svg::Plot pa{"Paralinearization residual", "amplitude a", "L2 norm", true, true, {}};
  svg::Plot pb{"Dyadic block ratios", "j", "r_j", false, true, {}};
  for (auto& r : res) {
    for (auto& row : r.rows) o.summary.rows.push_back(row);
    for (auto& row : r.extra_rows) blocks.rows.push_back(row);
    for (auto& m : r.monitors) o.monitors.push_back(m);
    for (auto& s : r.series) pa.series.push_back(s);
    for (auto& s : r.series2) pb.series.push_back(s);
  }
  o.extra_csv.push_back({"block_ratios.csv", blocks});
  o.plots.push_back({"paralin_residual", pa});
  o.plots.push_back({"block_ratios", pb});
}

void preset_rt(const ExperimentConfig& cfg, int threads, Outputs& o) {
  auto res = parallel_map(cfg.resolutions.size(), threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const TorusGrid g(cfg.resolutions[i], cfg.period);
    const Problem p = make_problem(cfg, cfg.z_for(i));
    const auto eta = initial_state(cfg, g);
    const auto sol = solve_interface_potentials(eta, p.tp, p.solver);
    const double diff = linf_norm(sol.rt_via_B - sol.rt_via_darcy);
    const auto& rb = sol.rt_via_B.values();
    const auto& rd = sol.rt_via_darcy.values();
    PointOutput out;
    out.values = {static_cast<double>(g.n()), diff};
    out.rows.push_back({std::to_string(g.n()), std::to_string(cfg.z_for(i)), num(diff),
                        num(diff / p.tp.jump_rho()), num(sol.flux_residual), num(*std::min_element(rb.begin(), rb.end())),
                        num(*std::min_element(rd.begin(), rd.end())), std::to_string(sol.certificate.iterations)});
    json j = {{"point", i},
              {"N", g.n()},
              {"rt_difference", diff},
              {"flux_residual", sol.flux_residual},
              {"iterations", sol.certificate.iterations},
              {"residual", sol.certificate.relative_residual},
              {"elapsed_s", seconds_since(t0)}};
    out.monitors.push_back(j.dump());
    svg::Series sb{"N=" + std::to_string(g.n()) + " via B", {}, rb, false},
        sd{"N=" + std::to_string(g.n()) + " via Darcy", {}, rd, false};
    for (std::size_t q = 0; q < g.n(); ++q) {
      sb.x.push_back(g.x(q));
      sd.x.push_back(g.x(q));
    }
    out.series2 = {sb, sd};
    return out;
  });
  o.summary.header = {"N", "M", "rt_difference_inf", "rt_difference_over_jump", "flux_residual", "min_rt_via_B",
                      "min_rt_via_darcy", "iterations", "observed_order"};
  svg::Plot pd{"RT cross-check", "N", "max |rt_B - rt_Darcy|", true, true, {{"difference", {}, {}, true}}};
  svg::Plot pr{"RT profiles (finest grid)", "x", "RT", false, false, res.back().series2};
  for (std::size_t i = 0; i < res.size(); ++i) {
    auto row = res[i].rows[0];
    double order = std::nan("");
    if (i > 0)
      order = std::log(res[i - 1].values[1] / res[i].values[1]) / std::log(res[i].values[0] / res[i - 1].values[0]);
    row.push_back(num(order));
    o.summary.rows.push_back(row);
    for (auto& m : res[i].monitors) o.monitors.push_back(m);
    pd.series[0].x.push_back(res[i].values[0]);
    pd.series[0].y.push_back(res[i].values[1]);
  }
  o.plots.push_back({"rt_difference", pd});
  o.plots.push_back({"rt_profiles", pr});
}

void preset_freeplay(const ExperimentConfig& cfg, int threads, Outputs& o) {
  auto res = parallel_map(cfg.resolutions.size(), threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const TorusGrid g(cfg.resolutions[i], cfg.period);
    const Problem p = make_problem(cfg, cfg.z_for(i));
    const auto eta0 = initial_state(cfg, g);
    PointOutput out;
    const auto sim = run_simulation(eta0, p, collect(out.monitors, {{"point", i}, {"N", g.n()}}, t0));
    double worst = -std::numeric_limits<double>::infinity(), min_b = std::nan(""), min_rt = std::nan("");
    svg::Series sl{"N=" + std::to_string(g.n()), {}, {}, false}, sd{"N=" + std::to_string(g.n()), {}, {}, false};
    const auto& rec = sim.records;
    for (std::size_t k = 0; k < rec.size(); ++k) {
      if (k > 0) worst = std::max(worst, (rec[k].l2_norm - rec[k - 1].l2_norm) / std::max(rec[k - 1].l2_norm, 1e-300));
      if (!std::isnan(rec[k].min_one_minus_B)) min_b = std::isnan(min_b) ? rec[k].min_one_minus_B : std::min(min_b, rec[k].min_one_minus_B);
      if (!std::isnan(rec[k].min_RT)) min_rt = std::isnan(min_rt) ? rec[k].min_RT : std::min(min_rt, rec[k].min_RT);
      sl.x.push_back(rec[k].t);
      sl.y.push_back(rec[k].l2_norm);
      sd.x.push_back(rec[k].t);
      sd.y.push_back(cfg.two_phase ? rec[k].min_RT : rec[k].min_one_minus_B);
    }
    if (rec.size() < 2) worst = std::nan("");
    out.rows.push_back({std::to_string(g.n()), std::to_string(cfg.z_for(i)), std::to_string(rec.back().step),
                        num(rec.back().t), sim.halt_reason, num(l2_norm(eta0)), num(l2_norm(sim.final_state)),
                        num(worst), num(min_b), num(min_rt), num(sim.energy_defect)});
    out.series = {sl};
    out.series2 = {sd};
    return out;
  });
  o.summary.header = {"N",       "M",          "steps",          "t_final",         "halt",  "l2_initial",
                      "l2_final", "max_rel_l2_increase", "min_one_minus_B", "min_RT", "energy_defect"};
  svg::Plot pl{"L2 norm", "t", "|eta|_L2", false, false, {}};
  svg::Plot pd{cfg.two_phase ? "min RT (via B)" : "min (1 - B)", "t", cfg.two_phase ? "min RT" : "min(1-B)", false,
               false, {}};
  for (auto& r : res) {
    for (auto& row : r.rows) o.summary.rows.push_back(row);
    for (auto& m : r.monitors) o.monitors.push_back(m);
    for (auto& s : r.series) pl.series.push_back(s);
    for (auto& s : r.series2) pd.series.push_back(s);
  }
  o.plots.push_back({"l2_norm", pl});
  o.plots.push_back({cfg.two_phase ? "min_rt" : "min_one_minus_b", pd});
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << s;
}

json error_record(const std::exception& e) {
  json j = {{"status", "error"}, {"message", e.what()}};
  if (auto c = dynamic_cast<const ConfigError*>(&e)) {
    j["kind"] = "config";
    j["violations"] = c->violations;
  } else if (auto g = dynamic_cast<const GeometryError*>(&e)) {
    j["kind"] = "geometry";
    j["min_gap"] = g->min_gap;
  } else if (auto m = dynamic_cast<const MapValidityError*>(&e)) {
    j["kind"] = "map_validity";
    j["min_rho_z"] = m->min_rho_z;
  } else if (auto s = dynamic_cast<const SolverError*>(&e)) {
    j["kind"] = "solver";
    j["residual_history"] = s->residual_history;
  } else if (dynamic_cast<const InputError*>(&e)) {
    j["kind"] = "input";
  } else {
    j["kind"] = "internal";
  }
  return j;
}

int exit_code_for(const json& err) {
  const auto k = err.value("kind", "");
  if (k == "config") return 2;
  if (k == "geometry" || k == "map_validity") return 3;
  if (k == "solver") return 4;
  if (k == "input") return 5;
  return 1;
}

}  // namespace

RunReport run_preset(const ExperimentConfig& cfg, int threads) {
  RunReport rep;
  rep.out_dir = cfg.output;
  const auto t0 = Clock::now();
  const std::string started = utc_now();
  const std::string text = serialize_config(cfg);
  json manifest = {{"code_version", MUSKAT_VERSION},
                   {"config_hash", sha256_hex(text)},
                   {"config", text},
                   {"preset", to_string(cfg.preset)},
                   {"seed", cfg.seed},
                   {"threads", threads},
                   {"started", started},
                   {"tolerances",
                    {{"dn_tol", cfg.dn_tol},
                     {"interface_tol", cfg.interface_tol},
                     {"step_tol", cfg.step_tol},
                     {"max_iter", cfg.max_iter},
                     {"separation", cfg.separation},
                     {"dealias_rule", 2.0 / 3.0},
                     {"map_det_check", 1e-10}}}};
  std::error_code ec;
  fs::create_directories(rep.out_dir / "plots", ec);
  try {
    if (ec) throw Error("cannot create " + (rep.out_dir / "plots").string() + ": " + ec.message());
    cfg.validate();
    Outputs o;
    switch (cfg.preset) {
      case Preset::Dispersion: preset_dispersion(cfg, threads, o); break;
      case Preset::Scaling: preset_scaling(cfg, threads, o); break;
      case Preset::Convergence: preset_convergence(cfg, threads, o); break;
      case Preset::ParalinResidual: preset_paralin(cfg, threads, o); break;
      case Preset::RtCrosscheck: preset_rt(cfg, threads, o); break;
      case Preset::Freeplay: preset_freeplay(cfg, threads, o); break;
    }
    write_text(rep.out_dir / "summary.csv", o.summary.csv());
    rep.files.push_back("summary.csv");
    for (const auto& [name, t] : o.extra_csv) {
      write_text(rep.out_dir / name, t.csv());
      rep.files.push_back(name);
    }
    std::string nd;
    for (const auto& m : o.monitors) nd += m + "\n";
    write_text(rep.out_dir / "monitors.ndjson", nd);
    rep.files.push_back("monitors.ndjson");
    for (const auto& [name, plot] : o.plots) {
      svg::write((rep.out_dir / "plots" / (name + ".svg")).string(), plot);
      rep.files.push_back("plots/" + name + ".svg");
    }
    manifest["status"] = "ok";
  } catch (const std::exception& e) {
    const json err = error_record(e);
    rep.exit_code = exit_code_for(err);
    rep.error = e.what();
    manifest["status"] = "error";
    manifest["error"] = err;
    if (!ec) {
      write_text(rep.out_dir / "error.json", err.dump(2) + "\n");
      rep.files.push_back("error.json");
    }
  }
  manifest["finished"] = utc_now();
  manifest["elapsed_s"] = seconds_since(t0);
  rep.files.push_back("manifest.json");
  manifest["files"] = rep.files;
  if (!ec) write_text(rep.out_dir / "manifest.json", manifest.dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------- checks

std::vector<CheckResult> run_invariant_checks(int threads) {
  std::vector<CheckResult> out;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    CheckResult r{name, false, ""};
    try {
      auto [ok, detail] = f();
      r.passed = ok;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    out.push_back(r);
  };
  char buf[256];

  check("flat_dn_oracle", [&] {
    const TorusGrid g(64);
    double worst = 0.0;
    for (std::optional<double> H : {std::optional<double>{}, std::optional<double>{1.0}}) {
      DomainGeometry geom;
      if (H) geom.bottom = Boundary::flat(*H);
      DNSettings s;
      s.z_intervals = 32;
      for (int k = 1; k <= 5; ++k) {
        const auto f = SpectralFunction::from_function(g, [k](double x) { return std::cos(k * x); });
        const auto r = dn_apply(SpectralFunction::zero(g), f, geom, Side::Lower, s);
        const double m = H ? k * std::tanh(k * *H) : k;
        worst = std::max(worst, l2_norm(r.g - f * m) / l2_norm(f * m));
      }
    }
    std::snprintf(buf, sizeof buf, "max relative error %.2e (limit 1e-3)", worst);
    return std::make_pair(worst <= 1e-3, std::string(buf));
  });

  check("dn_symmetric_nonnegative", [&] {
    const TorusGrid g(64);
    DomainGeometry geom;
    DNSettings s;
    s.z_intervals = 32;
    s.tol = 1e-13;  // symmetry holds to solver accuracy
    const auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x) + 0.1 * std::sin(2 * x); });
    const auto f = SpectralFunction::from_function(g, [](double x) { return std::sin(3 * x) + std::cos(x); });
    const auto h = SpectralFunction::from_function(g, [](double x) { return std::cos(2 * x) - 0.5 * std::sin(5 * x); });
    const auto Gf = dn_apply(eta, f, geom, Side::Lower, s).g, Gh = dn_apply(eta, h, geom, Side::Lower, s).g;
    const double asym = std::abs(inner_product(Gf, h) - inner_product(f, Gh)) / std::abs(inner_product(Gf, h));
    const double pos = inner_product(Gf, f);
    std::snprintf(buf, sizeof buf, "asymmetry %.2e, (Gf,f) = %.4f", asym, pos);
    return std::make_pair(asym < 1e-8 && pos > 0.0, std::string(buf));
  });

  check("one_phase_l2_and_B", [&] {
    const TorusGrid g(32);
    Problem p;
    p.evo.dt = 0.02;
    p.evo.t_end = 0.2;
    p.solver.dn.z_intervals = 16;
    const auto eta = SpectralFunction::from_function(g, [](double x) { return 0.1 * std::cos(x) + 0.05 * std::cos(2 * x); });
    const auto r = run_simulation(eta, p);
    bool mono = true;
    double min_b = 1.0;
    for (std::size_t k = 1; k < r.records.size(); ++k)
      mono = mono && r.records[k].l2_norm <= r.records[k - 1].l2_norm * (1.0 + 1e-10);
    for (const auto& rec : r.records) min_b = std::min(min_b, rec.min_one_minus_B);
    std::snprintf(buf, sizeof buf, "monotone %s, min(1-B) %.4f, halt %s", mono ? "yes" : "no", min_b, r.halt_reason.c_str());
    return std::make_pair(mono && min_b > 0.0 && r.halt_reason == "t_end", std::string(buf));
  });

  check("two_phase_flux_and_rt", [&] {
    const TorusGrid g(64);
    TwoPhaseConfig tp;
    tp.mu_plus = 2.0;
    TwoPhaseSettings s;
    s.dn.z_intervals = 16;
    const auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x); });
    const auto sol = solve_interface_potentials(eta, tp, s);
    const double d = linf_norm(sol.rt_via_B - sol.rt_via_darcy);
    std::snprintf(buf, sizeof buf, "flux residual %.2e, RT difference %.2e", sol.flux_residual, d);
    return std::make_pair(sol.flux_residual < 1e-6 && d < 1e-2 * tp.jump_rho(), std::string(buf));
  });

  check("paralin_flat", [&] {
    const TorusGrid g(64);
    DNSettings s;
    s.z_intervals = 64;
    const auto f = SpectralFunction::from_function(g, [](double x) { return std::cos(3 * x); });
    const auto pl = paralinearize_dn(SpectralFunction::zero(g), f, DomainGeometry{}, s);
    const double rel = l2_norm(pl.residual) / l2_norm(pl.dn.g);
    std::snprintf(buf, sizeof buf, "relative flat residual %.2e (limit 1e-4)", rel);
    return std::make_pair(rel < 1e-4, std::string(buf));
  });

  check("config_round_trip", [&] {
    bool ok = true;
    for (Preset p : {Preset::Dispersion, Preset::Scaling, Preset::Convergence, Preset::ParalinResidual,
                     Preset::RtCrosscheck, Preset::Freeplay}) {
      const auto c = preset_defaults(p);
      ok = ok && parse_config_text(serialize_config(c)) == c;
    }
    return std::make_pair(ok, std::string(ok ? "all presets" : "mismatch"));
  });

  check("determinism", [&] {
    auto c = preset_defaults(Preset::Freeplay);
    c.resolutions = {16, 32};
    c.z_intervals = {8};
    c.modes = {{1, 0.1, 0.0}};
    c.random_modes = 4;
    c.random_amplitude = 0.05;
    c.seed = 11;
    c.t_end = 0.1;
    c.dt = 0.02;
    const auto base = fs::temp_directory_path() / ("muskat_check_" + std::to_string(::getpid()));
    std::string s[2];
    for (int k = 0; k < 2; ++k) {
      c.output = (base / std::to_string(k)).string();
      const auto r = run_preset(c, k == 0 ? 1 : std::max(2, threads));
      if (r.exit_code != 0) return std::make_pair(false, "run failed: " + r.error);
      std::ifstream f(fs::path(c.output) / "summary.csv", std::ios::binary);
      std::stringstream ss;
      ss << f.rdbuf();
      s[k] = ss.str();
    }
    std::error_code ec;
    fs::remove_all(base, ec);
    return std::make_pair(!s[0].empty() && s[0] == s[1], std::string(s[0] == s[1] ? "identical summary.csv" : "differ"));
  });
  return out;
}

// ---------------------------------------------------------------- oracles

std::vector<std::string> oracle_names() {
  return {"flat_dn", "dispersion", "interface_potential", "sobolev", "rt_flat", "scaling"};
}

std::string oracle_report(const std::string& name, const ExperimentConfig& cfg) {
  std::ostringstream o;
  char buf[256];
  const double H = cfg.depth.value_or(1.0);
  if (name == "flat_dn") {
    o << "# G(0) cos(kx) = m(k) cos(kx)\n# k  |k|  k*tanh(k*H) with H=" << H << "\n";
    for (int k = 1; k <= 8; ++k) {
      std::snprintf(buf, sizeof buf, "%d %.15g %.15g\n", k, static_cast<double>(k), k * std::tanh(k * H));
      o << buf;
    }
  } else if (name == "dispersion") {
    const double jr = cfg.rho_minus - cfg.rho_plus;
    o << "# small-amplitude decay rates\n# k  one_phase_infinite  one_phase_depth_H  two_phase_infinite\n";
    o << "# kappa=" << cfg.kappa << " H=" << H << " mu_plus=" << cfg.mu_plus << " mu_minus=" << cfg.mu_minus
      << " jump_rho=" << jr << "\n";
    for (int k : cfg.wavenumbers) {
      std::snprintf(buf, sizeof buf, "%d %.15g %.15g %.15g\n", k, cfg.kappa * k, cfg.kappa * k * std::tanh(k * H),
                    jr * k / (cfg.mu_plus + cfg.mu_minus));
      o << buf;
    }
  } else if (name == "interface_potential") {
    const double jr = cfg.rho_minus - cfg.rho_plus;
    const double cm = jr * cfg.mu_minus / (cfg.mu_plus + cfg.mu_minus);
    std::snprintf(buf, sizeof buf,
                  "# flat linearization, infinite depths\nf_minus = %.15g * eta\nf_plus = %.15g * eta\n", cm,
                  cm - jr);
    o << buf;
  } else if (name == "sobolev") {
    o << "# |cos(kx)|_{H^s} on [0, 2pi) = sqrt(pi (1+k^2)^s)\n# k  s=0  s=1  s=2\n";
    for (int k = 0; k <= 4; ++k) {
      const double f = k == 0 ? 2.0 : 1.0;  // the constant has |.|^2 = 2 pi
      std::snprintf(buf, sizeof buf, "%d %.15g %.15g %.15g\n", k, std::sqrt(f * std::numbers::pi),
                    std::sqrt(f * std::numbers::pi * (1.0 + k * k)), std::sqrt(f * std::numbers::pi * std::pow(1.0 + k * k, 2)));
      o << buf;
    }
  } else if (name == "rt_flat") {
    std::snprintf(buf, sizeof buf, "# eta = 0: B^+- = 0, G f = 0\nRT = jump_rho = %.15g\n",
                  cfg.rho_minus - cfg.rho_plus);
    o << buf;
  } else if (name == "scaling") {
    o << "# infinite depth: eta_l(t, x) = eta(l t, l x) / l solves the same equation\n";
    o << "# lambda = " << cfg.lambda << ": run eta_0(l x)/l to T and eta_0 to l T, compare at matched steps\n";
  } else {
    return {};
  }
  return o.str();
}

}  // namespace muskat
