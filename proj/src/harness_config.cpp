#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "muskat/harness.hpp"

namespace muskat {

namespace {

const std::map<std::string, Preset> kPresetNames = {
    {"dispersion", Preset::Dispersion},        {"scaling", Preset::Scaling},
    {"convergence", Preset::Convergence},      {"paralin_residual", Preset::ParalinResidual},
    {"rt_crosscheck", Preset::RtCrosscheck},   {"freeplay", Preset::Freeplay},
};

bool power_of_two(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

}  // namespace

std::string to_string(Preset p) {
  for (const auto& [name, v] : kPresetNames)
    if (v == p) return name;
  return "?";
}

Preset preset_from_string(const std::string& name) {
  const auto it = kPresetNames.find(name);
  if (it == kPresetNames.end()) {
    std::string known;
    for (const auto& kv : kPresetNames) known += (known.empty() ? "" : ", ") + kv.first;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

ExperimentConfig preset_defaults(Preset p) {
  ExperimentConfig c;
  c.preset = p;
  c.output = "out/" + to_string(p);
  switch (p) {
    case Preset::Dispersion:
      c.monitor_every = 20;
      break;
    case Preset::Scaling:
      c.resolutions = {256};
      c.z_intervals = {64};
      c.modes = {{1, 0.2, 0.0}, {2, 0.1, 0.5}};
      c.monitor_every = 10;
      break;
    case Preset::Convergence:
      c.resolutions = {256};
      c.z_intervals = {32, 64, 128};
      c.wavenumbers = {1, 2, 3, 5, 8};
      break;
    case Preset::ParalinResidual:
      c.resolutions = {128, 256};
      c.z_intervals = {1024};
      c.random_modes = 40;
      c.random_amplitude = 0.1;
      break;
    case Preset::RtCrosscheck:
      c.two_phase = true;
      c.mu_plus = 2.0;
      c.mu_minus = 1.0;
      c.resolutions = {64, 128, 256};
      c.z_intervals = {16, 32, 64};
      c.modes = {{1, 0.2, 0.0}};
      break;
    case Preset::Freeplay:
      c.modes = {{1, 0.1, 0.0}, {2, 0.05, 0.0}};
      c.t_end = 1.0;
      c.monitor_every = 5;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> v;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  need(!resolutions.empty(), "grid.resolutions must not be empty");
  for (auto n : resolutions) need(power_of_two(n), "grid.resolutions: " + std::to_string(n) + " is not a power of two >= 8");
  need(!z_intervals.empty(), "grid.z_intervals must not be empty");
  for (auto m : z_intervals) need(m >= 8 && m % 2 == 0, "grid.z_intervals: " + std::to_string(m) + " must be even and >= 8");
  if (preset != Preset::Convergence)
    need(z_intervals.size() == 1 || z_intervals.size() == resolutions.size(),
         "grid.z_intervals needs one entry or one per resolution");
  else
    need(z_intervals.size() >= 2, "convergence needs at least two z_intervals");
  need(std::isfinite(period) && period > 0.0, "grid.period must be positive");

  need(kappa > 0.0, "physics.kappa must be positive");
  need(mu_plus > 0.0 && mu_minus > 0.0, "physics viscosities must be positive");
  need(std::isfinite(rho_plus) && std::isfinite(rho_minus), "physics densities must be finite");
  if (two_phase) need(rho_minus - rho_plus > 0.0, "physics: rho_minus - rho_plus must be positive");
  if (depth) need(*depth > 0.0 && std::isfinite(*depth), "physics.depth must be positive or 'infinite'");
  if (top_depth) need(*top_depth > 0.0 && std::isfinite(*top_depth), "physics.top_depth must be positive or 'infinite'");
  need(separation > 0.0, "physics.separation must be positive");

  need(dt > 0.0 && std::isfinite(dt), "time.dt must be positive");
  need(t_end > 0.0 && std::isfinite(t_end), "time.t_end must be positive");
  need(epsilon >= 0.0 && std::isfinite(epsilon), "time.epsilon must be nonnegative");
  need(monitor_every >= 1, "time.monitor_every must be >= 1");
  need(std::isfinite(hs_index), "time.hs_index must be finite");

  need(dn_tol > 0.0 && interface_tol > 0.0 && step_tol > 0.0, "solver tolerances must be positive");
  need(max_iter >= 1, "solver.max_iter must be >= 1");

  const std::size_t n_min = resolutions.empty() ? 8 : *std::min_element(resolutions.begin(), resolutions.end());
  const int k_limit = static_cast<int>(n_min / 3);
  for (const auto& m : modes) {
    need(std::isfinite(m.amplitude) && std::isfinite(m.phase), "initial.modes: amplitudes and phases must be finite");
    need(m.k >= 0 && m.k <= k_limit, "initial.modes: k = " + std::to_string(m.k) + " outside 0.." +
                                         std::to_string(k_limit) + " for the coarsest grid");
  }
  need(random_modes >= 0 && random_modes <= k_limit, "initial.random.modes outside 0.." + std::to_string(k_limit));
  need(std::isfinite(random_amplitude), "initial.random.amplitude must be finite");
  if (!initial_file.empty()) {
    std::filesystem::path p(initial_file);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    need(std::filesystem::exists(p), "initial.file '" + p.string() + "' does not exist");
  }

  need(!wavenumbers.empty(), "wavenumbers must not be empty");
  for (int k : wavenumbers) need(k >= 1 && k <= k_limit, "wavenumber " + std::to_string(k) + " not resolved");
  need(std::isfinite(amplitude) && amplitude > 0.0, "dispersion.amplitude must be positive");
  need(steps_per_decay >= 4, "dispersion.steps_per_decay must be >= 4");
  need(lambda >= 2, "scaling.lambda must be an integer >= 2");
  if (preset == Preset::Scaling) {
    for (const auto& m : modes)
      need(m.k * lambda <= k_limit, "scaling: lambda * k exceeds the resolved band");
    need(random_modes * lambda <= k_limit, "scaling: lambda * random.modes exceeds the resolved band");
  }
  need(!amplitudes.empty(), "paralin_residual.amplitudes must not be empty");
  for (double a : amplitudes) need(std::isfinite(a) && a > 0.0, "paralin_residual.amplitudes must be positive");
  if (preset == Preset::RtCrosscheck) need(two_phase, "rt_crosscheck needs physics.two_phase: true");
  need(!output.empty(), "output must not be empty");
  if (!v.empty()) throw ConfigError(v);
}

namespace {

class Reader {
 public:
  Reader(std::string origin) : origin_(std::move(origin)) {}

  std::string where(const YAML::Mark& m) const {
    if (m.is_null()) return origin_;
    return origin_ + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
  }
  void fail(const YAML::Node& n, const std::string& msg) { errors.push_back(where(n.Mark()) + ": " + msg); }

  /// Rejects keys outside `allowed`; returns false if `n` is not a map.
  bool keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& section) {
    if (!n.IsMap()) {
      fail(n, "section '" + section + "' must be a mapping");
      return false;
    }
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key))
        errors.push_back(where(kv.first.Mark()) + ": unknown key '" + key + "'" +
                         (section.empty() ? "" : " in section '" + section + "'"));
    }
    return true;
  }

  template <class T>
  void get(const YAML::Node& parent, const char* key, T& out) {
    const auto n = parent[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("'") + key + "' has the wrong type");
    }
  }

  void depth(const YAML::Node& parent, const char* key, std::optional<double>& out) {
    const auto n = parent[key];
    if (!n) return;
    if (n.IsScalar() && n.Scalar() == "infinite") {
      out.reset();
      return;
    }
    try {
      out = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("'") + key + "' must be a number or 'infinite'");
    }
  }

  std::vector<std::string> errors;

 private:
  std::string origin_;
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  if (std::isnan(v)) return ".nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  // keep it a float for YAML readers
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <class T>
std::string list(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) s += fmt(v[i]);
    else s += std::to_string(v[i]);
  }
  return s + "]";
}

std::string quoted(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o + "\"";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": parse error: " + e.msg);
  }
  if (root.IsNull()) throw ConfigError(origin + ": empty configuration");
  Reader r(origin);
  if (!r.keys(root, {"preset", "seed", "output", "grid", "physics", "time", "solver", "initial", "dispersion",
                     "scaling", "convergence", "paralin_residual"},
              ""))
    throw ConfigError(r.errors);

  Preset preset = Preset::Dispersion;
  if (root["preset"]) {
    try {
      preset = preset_from_string(root["preset"].as<std::string>());
    } catch (const ConfigError& e) {
      r.fail(root["preset"], e.what());
    } catch (const YAML::Exception&) {
      r.fail(root["preset"], "'preset' must be a string");
    }
  }
  ExperimentConfig c = preset_defaults(preset);
  c.base_dir = base_dir;
  r.get(root, "seed", c.seed);
  r.get(root, "output", c.output);

  if (const auto g = root["grid"]; g && r.keys(g, {"resolutions", "z_intervals", "period"}, "grid")) {
    r.get(g, "resolutions", c.resolutions);
    r.get(g, "z_intervals", c.z_intervals);
    r.get(g, "period", c.period);
  }
  if (const auto p = root["physics"];
      p && r.keys(p, {"two_phase", "kappa", "mu_plus", "mu_minus", "rho_plus", "rho_minus", "depth", "top_depth",
                      "separation"},
                  "physics")) {
    r.get(p, "two_phase", c.two_phase);
    r.get(p, "kappa", c.kappa);
    r.get(p, "mu_plus", c.mu_plus);
    r.get(p, "mu_minus", c.mu_minus);
    r.get(p, "rho_plus", c.rho_plus);
    r.get(p, "rho_minus", c.rho_minus);
    r.depth(p, "depth", c.depth);
    r.depth(p, "top_depth", c.top_depth);
    r.get(p, "separation", c.separation);
  }
  if (const auto t = root["time"];
      t && r.keys(t, {"dt", "t_end", "scheme", "epsilon", "monitor_every", "hs_index", "nested"}, "time")) {
    r.get(t, "dt", c.dt);
    r.get(t, "t_end", c.t_end);
    if (t["scheme"]) {
      std::string s;
      r.get(t, "scheme", s);
      if (s == "semi_implicit") c.scheme = Scheme::SemiImplicit;
      else if (s == "explicit_rk4") c.scheme = Scheme::ExplicitRK4;
      else r.fail(t["scheme"], "scheme must be semi_implicit or explicit_rk4");
    }
    r.get(t, "epsilon", c.epsilon);
    r.get(t, "monitor_every", c.monitor_every);
    r.get(t, "hs_index", c.hs_index);
    r.get(t, "nested", c.nested);
  }
  if (const auto s = root["solver"];
      s && r.keys(s, {"dn_tol", "interface_tol", "step_tol", "max_iter"}, "solver")) {
    r.get(s, "dn_tol", c.dn_tol);
    r.get(s, "interface_tol", c.interface_tol);
    r.get(s, "step_tol", c.step_tol);
    r.get(s, "max_iter", c.max_iter);
  }
  if (const auto in = root["initial"]; in && r.keys(in, {"modes", "file", "random"}, "initial")) {
    if (const auto m = in["modes"]) {
      c.modes.clear();
      if (!m.IsSequence()) r.fail(m, "'modes' must be a list");
      else
        for (const auto& e : m) {
          ModeSpec ms;
          if (r.keys(e, {"k", "amplitude", "phase"}, "initial.modes")) {
            r.get(e, "k", ms.k);
            r.get(e, "amplitude", ms.amplitude);
            r.get(e, "phase", ms.phase);
          }
          c.modes.push_back(ms);
        }
    }
    r.get(in, "file", c.initial_file);
    if (const auto rnd = in["random"]; rnd && r.keys(rnd, {"modes", "amplitude"}, "initial.random")) {
      r.get(rnd, "modes", c.random_modes);
      r.get(rnd, "amplitude", c.random_amplitude);
    }
  }
  if (const auto d = root["dispersion"];
      d && r.keys(d, {"wavenumbers", "amplitude", "steps_per_decay"}, "dispersion")) {
    r.get(d, "wavenumbers", c.wavenumbers);
    r.get(d, "amplitude", c.amplitude);
    r.get(d, "steps_per_decay", c.steps_per_decay);
  }
  if (const auto s = root["scaling"]; s && r.keys(s, {"lambda"}, "scaling")) r.get(s, "lambda", c.lambda);
  if (const auto cv = root["convergence"]; cv && r.keys(cv, {"wavenumbers"}, "convergence"))
    r.get(cv, "wavenumbers", c.wavenumbers);
  if (const auto p = root["paralin_residual"]; p && r.keys(p, {"amplitudes"}, "paralin_residual"))
    r.get(p, "amplitudes", c.amplitudes);

  std::vector<std::string> all = r.errors;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations) all.push_back(origin + ": " + v);
  }
  if (!all.empty()) throw ConfigError(all);
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read configuration " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path.string(), path.parent_path().string());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  auto depth = [](const std::optional<double>& d) { return d ? fmt(*d) : std::string("infinite"); };
  o << "preset: " << to_string(c.preset) << "\n";
  o << "seed: " << c.seed << "\n";
  o << "output: " << quoted(c.output) << "\n";
  o << "grid:\n";
  o << "  resolutions: " << list(c.resolutions) << "\n";
  o << "  z_intervals: " << list(c.z_intervals) << "\n";
  o << "  period: " << fmt(c.period) << "\n";
  o << "physics:\n";
  o << "  two_phase: " << (c.two_phase ? "true" : "false") << "\n";
  o << "  kappa: " << fmt(c.kappa) << "\n";
  o << "  mu_plus: " << fmt(c.mu_plus) << "\n";
  o << "  mu_minus: " << fmt(c.mu_minus) << "\n";
  o << "  rho_plus: " << fmt(c.rho_plus) << "\n";
  o << "  rho_minus: " << fmt(c.rho_minus) << "\n";
  o << "  depth: " << depth(c.depth) << "\n";
  o << "  top_depth: " << depth(c.top_depth) << "\n";
  o << "  separation: " << fmt(c.separation) << "\n";
  o << "time:\n";
  o << "  dt: " << fmt(c.dt) << "\n";
  o << "  t_end: " << fmt(c.t_end) << "\n";
  o << "  scheme: " << (c.scheme == Scheme::SemiImplicit ? "semi_implicit" : "explicit_rk4") << "\n";
  o << "  epsilon: " << fmt(c.epsilon) << "\n";
  o << "  monitor_every: " << c.monitor_every << "\n";
  o << "  hs_index: " << fmt(c.hs_index) << "\n";
  o << "  nested: " << (c.nested ? "true" : "false") << "\n";
  o << "solver:\n";
  o << "  dn_tol: " << fmt(c.dn_tol) << "\n";
  o << "  interface_tol: " << fmt(c.interface_tol) << "\n";
  o << "  step_tol: " << fmt(c.step_tol) << "\n";
  o << "  max_iter: " << c.max_iter << "\n";
  o << "initial:\n";
  o << "  modes:";
  if (c.modes.empty()) o << " []";
  o << "\n";
  for (const auto& m : c.modes)
    o << "    - {k: " << m.k << ", amplitude: " << fmt(m.amplitude) << ", phase: " << fmt(m.phase) << "}\n";
  o << "  file: " << quoted(c.initial_file) << "\n";
  o << "  random:\n";
  o << "    modes: " << c.random_modes << "\n";
  o << "    amplitude: " << fmt(c.random_amplitude) << "\n";
  o << "dispersion:\n";
  o << "  wavenumbers: " << list(c.wavenumbers) << "\n";
  o << "  amplitude: " << fmt(c.amplitude) << "\n";
  o << "  steps_per_decay: " << c.steps_per_decay << "\n";
  o << "scaling:\n";
  o << "  lambda: " << c.lambda << "\n";
  o << "paralin_residual:\n";
  o << "  amplitudes: " << list(c.amplitudes) << "\n";
  return o.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace muskat
