#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "muskat/harness.hpp"
#include "muskat/svg.hpp"

using namespace muskat;

namespace {
std::string messages(const ConfigError& e) {
  std::string s;
  for (const auto& v : e.violations) s += v + "\n";
  return s;
}

std::string read(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("preset names") {
  for (auto p : {Preset::Dispersion, Preset::Scaling, Preset::Convergence, Preset::ParalinResidual,
                 Preset::RtCrosscheck, Preset::Freeplay})
    CHECK(preset_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(preset_from_string("nope"), ConfigError);
}

TEST_CASE("a minimal configuration picks up preset defaults") {
  auto c = parse_config_text("preset: rt_crosscheck\nseed: 5\n");
  CHECK(c.preset == Preset::RtCrosscheck);
  CHECK(c.seed == 5);
  CHECK(c.two_phase);
  CHECK(c.resolutions.size() == 3);
}

TEST_CASE("unknown keys are reported with their position") {
  try {
    parse_config_text("preset: freeplay\ngrid:\n  resolution: [64]\n", "cfg.yaml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto m = messages(e);
    CHECK(m.find("cfg.yaml:3:") != std::string::npos);
    CHECK(m.find("unknown key 'resolution'") != std::string::npos);
  }
}

TEST_CASE("every violation is collected") {
  try {
    parse_config_text("preset: freeplay\ngrid:\n  resolutions: [100]\n  z_intervals: [7]\ntime:\n  dt: -1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto m = messages(e);
    CHECK(m.find("100 is not a power of two") != std::string::npos);
    CHECK(m.find("7 must be even") != std::string::npos);
    CHECK(m.find("time.dt") != std::string::npos);
    CHECK(e.violations.size() >= 3);
  }
}

TEST_CASE("wrong types and bad depth values") {
  CHECK_THROWS_AS(parse_config_text("preset: freeplay\nseed: abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("preset: freeplay\nphysics:\n  depth: deep\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("preset: freeplay\ntime:\n  scheme: leapfrog\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("preset: freeplay\ninitial:\n  file: /no/such/file.txt\n"), ConfigError);
  auto c = parse_config_text("preset: freeplay\nphysics:\n  depth: infinite\n");
  CHECK(!c.depth);
  auto d = parse_config_text("preset: freeplay\nphysics:\n  depth: 1.5\n");
  CHECK(d.depth == 1.5);
}

TEST_CASE("serialization round-trips every preset") {
  for (auto p : {Preset::Dispersion, Preset::Scaling, Preset::Convergence, Preset::ParalinResidual,
                 Preset::RtCrosscheck, Preset::Freeplay}) {
    auto c = preset_defaults(p);
    c.seed = 123456789012345ULL;
    c.dt = 0.1 + 0.2;
    c.modes.push_back({3, 1.0 / 3.0, 0.7});
    auto back = parse_config_text(serialize_config(c));
    CHECK(back == c);
  }
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("initial state from modes and from a file") {
  auto c = preset_defaults(Preset::Freeplay);
  c.modes = {{2, 0.5, 0.0}};
  TorusGrid g(32);
  auto eta = initial_state(c, g);
  CHECK(eta.coefficient(2).real() == doctest::Approx(0.25));

  const auto dir = std::filesystem::temp_directory_path() / "muskat_unit_initial";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "eta.txt");
    f.precision(17);
    for (int i = 0; i < 16; ++i) f << 0.1 * std::cos(kTwoPi * i / 16.0) << (i % 4 == 3 ? "\n" : ", ");
  }
  auto cf = parse_config_text("preset: freeplay\ninitial:\n  modes: []\n  file: eta.txt\n", "x", dir.string());
  auto ef = initial_state(cf, g);
  CHECK(ef.coefficient(1).real() == doctest::Approx(0.05));
  CHECK(std::abs(ef.coefficient(3)) < 1e-14);
  std::filesystem::remove_all(dir);
}

TEST_CASE("random initial data depends on the seed only") {
  auto c = preset_defaults(Preset::Freeplay);
  c.modes.clear();
  c.random_modes = 5;
  c.random_amplitude = 0.1;
  c.seed = 9;
  TorusGrid g(32);
  auto a = initial_state(c, g), b = initial_state(c, g);
  CHECK(l2_norm(a - b) == 0.0);
  c.seed = 10;
  CHECK(l2_norm(a - initial_state(c, g)) > 0.0);
}

TEST_CASE("svg output") {
  svg::Plot p;
  p.title = "t & <x>";
  p.log_y = true;
  p.series.push_back({"s", {1, 2, 3, 4}, {1.0, NAN, 0.1, -1.0}, true});
  const auto s = svg::render(p);
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("t &amp; &lt;x&gt;") != std::string::npos);
  CHECK(s.find("nan") == std::string::npos);
}

TEST_CASE("a tiny freeplay run writes every artifact") {
  auto c = preset_defaults(Preset::Freeplay);
  c.resolutions = {32};
  c.z_intervals = {16};
  c.t_end = 0.05;
  const auto dir = std::filesystem::temp_directory_path() / "muskat_unit_run";
  std::filesystem::remove_all(dir);
  c.output = dir.string();
  auto r = run_preset(c, 1);
  CHECK(r.exit_code == 0);
  for (const char* f : {"summary.csv", "monitors.ndjson", "manifest.json"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(read(dir / "manifest.json").find(sha256_hex(serialize_config(c))) != std::string::npos);
  std::filesystem::remove_all(dir);
}

namespace {
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}
}  // namespace

TEST_CASE("dispersion and convergence presets at defaults") {
  const auto dir = std::filesystem::temp_directory_path() / "muskat_unit_presets";
  std::filesystem::remove_all(dir);
  auto d = preset_defaults(Preset::Dispersion);
  d.output = (dir / "d").string();
  REQUIRE(run_preset(d).exit_code == 0);
  auto rows = csv_rows(read(dir / "d" / "summary.csv"));
  const auto ratio = column(rows[0], "ratio");
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][ratio]) >= 0.99);
    CHECK(std::stod(rows[i][ratio]) <= 1.01);
  }
  auto c = preset_defaults(Preset::Convergence);
  c.output = (dir / "c").string();
  REQUIRE(run_preset(c).exit_code == 0);
  rows = csv_rows(read(dir / "c" / "summary.csv"));
  const auto sl = column(rows[0], "slope_flux");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][sl]) >= 1.9);
  std::filesystem::remove_all(dir);
}

TEST_CASE("freeplay with zero data gives flat monitors") {
  const auto dir = std::filesystem::temp_directory_path() / "muskat_unit_zero";
  std::filesystem::remove_all(dir);
  auto c = parse_config_text("preset: freeplay\ninitial:\n  modes: []\ngrid:\n  resolutions: [32]\n  z_intervals: [16]\n");
  c.output = dir.string();
  REQUIRE(run_preset(c).exit_code == 0);
  std::stringstream nd(read(dir / "monitors.ndjson"));
  std::string line;
  int n = 0;
  while (std::getline(nd, line)) {
    CHECK(line.find("\"l2_norm\":0.0") != std::string::npos);
    ++n;
  }
  CHECK(n > 10);
  std::filesystem::remove_all(dir);
}
