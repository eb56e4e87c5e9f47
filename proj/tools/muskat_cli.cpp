// muskat: run presets, the invariant suite, or print oracle tables.
//
//   muskat run configs/dispersion.yaml --out runs/d1 --threads 2
//   muskat run --preset convergence
//   muskat check
//   muskat oracle flat_dn --config configs/dispersion.yaml

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "muskat/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::string preset;
};

muskat::ExperimentConfig load(const Flags& f) {
  using namespace muskat;
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = parse_config(f.config);
    if (!f.preset.empty()) cfg.preset = preset_from_string(f.preset);
  } else {
    cfg = preset_defaults(f.preset.empty() ? Preset::Dispersion : preset_from_string(f.preset));
  }
  if (!f.out.empty()) cfg.output = f.out;
  if (f.seed) cfg.seed = *f.seed;
  cfg.validate();
  return cfg;
}

void print_error(const std::exception& e) {
  nlohmann::json j = {{"status", "error"}, {"message", e.what()}};
  if (auto c = dynamic_cast<const muskat::ConfigError*>(&e)) j["violations"] = c->violations;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Muskat problem laboratory"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "configuration file (YAML)");
  app.add_option("--out", flags.out, "output directory, overrides the file");
  app.add_option("--threads", flags.threads, "worker threads for ladder points")->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "random seed, overrides the file");
  app.add_option("--preset", flags.preset, "preset name, overrides the file");

  auto* run = app.add_subcommand("run", "run a preset and write its artifacts");
  std::string positional;
  run->add_option("config", positional, "configuration file");
  run->fallthrough();

  auto* check = app.add_subcommand("check", "run the invariant suite");
  check->fallthrough();

  auto* oracle = app.add_subcommand("oracle", "print closed-form oracle values");
  std::string oracle_name;
  oracle->add_option("name", oracle_name, "oracle name")->required();
  oracle->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!positional.empty()) {
        if (!flags.config.empty() && flags.config != positional)
          throw muskat::ConfigError("two configuration files given");
        flags.config = positional;
      }
      const auto cfg = load(flags);
      const auto rep = muskat::run_preset(cfg, flags.threads);
      if (rep.exit_code != 0) {
        std::cerr << "error: " << rep.error << " (see " << (rep.out_dir / "error.json").string() << ")\n";
        return rep.exit_code;
      }
      std::cout << "wrote";
      for (const auto& f : rep.files) std::cout << ' ' << (rep.out_dir / f).string();
      std::cout << "\n";
      return 0;
    }
    if (*check) {
      const auto res = muskat::run_invariant_checks(flags.threads);
      int failed = 0;
      for (const auto& r : res) {
        std::printf("%-28s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
        failed += r.passed ? 0 : 1;
      }
      std::printf("%d/%zu checks passed\n", static_cast<int>(res.size()) - failed, res.size());
      return failed ? 1 : 0;
    }
    if (*oracle) {
      const auto cfg = load(flags);
      const auto text = muskat::oracle_report(oracle_name, cfg);
      if (text.empty()) {
        std::string known;
        for (const auto& n : muskat::oracle_names()) known += " " + n;
        std::cerr << "unknown oracle '" << oracle_name << "'; known:" << known << "\n";
        return 2;
      }
      std::cout << text;
      return 0;
    }
  } catch (const muskat::ConfigError& e) {
    print_error(e);
    return 2;
  } catch (const std::exception& e) {
    print_error(e);
    return 1;
  }
  return 0;
}
