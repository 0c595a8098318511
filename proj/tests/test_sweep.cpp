#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "oracle.hpp"
#include "wigner/errors.hpp"
#include "wigner/sweep.hpp"

using namespace wigner;
namespace fs = std::filesystem;

namespace {

SweepConfig noiseless() {
  SweepConfig c;
  c.noise.reset();
  return c;
}

// Small noisy sweep with a short optimiser budget, cheap enough for unit tests.
SweepConfig quick_noisy() {
  SweepConfig c;
  c.points = 3;
  c.u_min = 5;
  c.u_max = 75;
  c.optimizer.max_evaluations = 40;
  return c;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wigner_sweep_tests";
  fs::create_directories(dir);
  return dir / name;
}

SweepRecord sample_record(double u, bool mitigated) {
  SweepRecord r;
  r.u = u;
  r.e_exact = -0.36896479105312891 + u;
  r.e_raw = r.e_exact + 1.0 / 3.0;
  r.rel_error_raw = relative_error(r.e_raw, r.e_exact);
  r.evaluations = 1234;
  r.converged = true;
  if (mitigated) {
    MitigationDiagnostics d;
    d.scale_factors = {1, 3, 5};
    d.energies = {r.e_raw, r.e_raw + 0.1, r.e_raw + 0.2 + 1e-17};
    d.coefficients = {r.e_exact + 0.01, 0.05};
    d.value = r.e_exact + 0.01;
    r.mitigation = d;
    r.e_mitigated = d.value;
    r.rel_error_mitigated = relative_error(d.value, r.e_exact);
  }
  return r;
}

}  // namespace

TEST_CASE("default grid") {
  const SweepConfig c;
  const auto g = c.grid();
  REQUIRE(g.size() == 15);
  for (int k = 0; k < 15; ++k) CHECK(std::abs(g[static_cast<std::size_t>(k)] - (5.0 + 5.0 * k)) <= 1e-12);
  CHECK(g.front() == 5.0);
  CHECK(g.back() == 75.0);

  SweepConfig odd;
  odd.u_min = 0.3;
  odd.u_max = 1.0;
  odd.points = 8;
  const auto h = odd.grid();
  for (int k = 0; k < 8; ++k) CHECK(std::abs(h[static_cast<std::size_t>(k)] - (0.3 + 0.1 * k)) <= 1e-12);
}

TEST_CASE("config validation") {
  SweepConfig c;
  c.validate();
  c.u_min = 80;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SweepConfig{};
  c.points = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SweepConfig{};
  c.points = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.u_min = c.u_max = 45;
  c.validate();
  c = SweepConfig{};
  c.initial_state = 0b000111;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SweepConfig{};
  c.mitigation.scale_factors = {1, 4};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SweepConfig{};
  c.ring.electrons = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("initial state defaults to the classical minimum") {
  SweepConfig c;
  RingConfig r = c.ring;
  r.interaction = 45;
  CHECK(resolve_ansatz(c, r).initial_state == 0b001001);
  r.interaction = 0;
  CHECK(resolve_ansatz(c, r).initial_state == 0b000011);
  c.initial_state = 0b000101;
  CHECK(resolve_ansatz(c, r).initial_state == 0b000101);
  c.ansatz = AnsatzKind::HardwareEfficient;
  CHECK(resolve_ansatz(c, r).initial_state == 0);
}

TEST_CASE("point seeds are distinct and reproducible") {
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < 15; ++k) seeds.push_back(point_seed(0, k));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    CHECK(seeds[i] == point_seed(0, i));
    for (std::size_t j = 0; j < i; ++j) CHECK(seeds[i] != seeds[j]);
  }
  CHECK(point_seed(1, 0) != point_seed(0, 0));
}

TEST_CASE("noiseless sweep tracks the oracle") {
  SweepConfig c = noiseless();
  c.workers = 4;
  const auto recs = run_sweep(c);
  REQUIRE(recs.size() == 15);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    CHECK(std::abs(r.u - (5.0 + 5.0 * static_cast<double>(k))) <= 1e-12);
    RingConfig ring = c.ring;
    ring.interaction = r.u;
    std::vector<Bitmask> states;
    CHECK(r.e_exact == doctest::Approx(oracle::lowest(oracle::sector_matrix(ring, states))).epsilon(1e-11));
    CHECK(r.rel_error_raw <= 0.01);
    CHECK_FALSE(r.e_mitigated.has_value());
    CHECK_FALSE(r.rel_error_mitigated.has_value());
    CHECK(std::abs(r.rel_error_raw - relative_error(r.e_raw, r.e_exact)) <= 1e-9);
  }
}

TEST_CASE("single-point sweep") {
  SweepConfig c = noiseless();
  c.points = 1;
  c.u_min = c.u_max = 45;
  const auto recs = run_sweep(c);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].u == 45.0);
}

TEST_CASE("noisy sweep: mitigated fields, row consistency, worker independence") {
  SweepConfig c = quick_noisy();
  const auto serial = run_sweep(c);
  c.workers = 3;
  const auto parallel = run_sweep(c);
  REQUIRE(serial.size() == 3);
  CHECK(serial == parallel);
  for (const auto& r : serial) {
    REQUIRE(r.e_mitigated.has_value());
    REQUIRE(r.mitigation.has_value());
    CHECK(*r.e_mitigated == r.mitigation->value);
    CHECK(std::abs(*r.rel_error_mitigated - relative_error(*r.e_mitigated, r.e_exact)) <= 1e-9);
    CHECK(std::abs(r.rel_error_raw - relative_error(r.e_raw, r.e_exact)) <= 1e-9);
    CHECK(r.evaluations == 40);
  }

  std::ostringstream a, b;
  write_csv(a, serial);
  write_csv(b, run_sweep(quick_noisy()));
  CHECK(a.str() == b.str());

  SweepConfig off = quick_noisy();
  off.mitigation.zne_enabled = false;
  off.mitigation.dd_enabled = false;
  for (const auto& r : run_sweep(off)) CHECK_FALSE(r.e_mitigated.has_value());
}

TEST_CASE("a failing point aborts the sweep and names its U") {
  SweepConfig c = quick_noisy();
  c.ring.sites = 13;  // too many qubits for the density-matrix simulator
  c.u_min = 10;
  c.u_max = 20;
  c.points = 2;
  try {
    run_sweep(c);
    FAIL("sweep should have thrown");
  } catch (const SweepError& e) {
    CHECK(e.u() == 10.0);
    CHECK(std::string(e.what()).find("U=10") != std::string::npos);
    CHECK_THROWS_AS(std::rethrow_exception(e.cause()), DomainError);
  }
}

TEST_CASE("csv layout") {
  std::ostringstream os;
  write_csv(os, {sample_record(5, false)});
  const auto lines = lines_of(os.str());
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "U,E_exact,E_raw,E_mitigated,rel_error_raw_pct,rel_error_mitigated_pct");
  const auto f = split(lines[1], ',');
  REQUIRE(f.size() == 6);
  CHECK(f[0] == "5");
  CHECK(f[1] == "4.63104");
  CHECK(f[3].empty());
  CHECK(f[5].empty());

  std::ostringstream full;
  write_csv(full, {sample_record(5, true), sample_record(10, true)});
  const auto rows = lines_of(full.str());
  REQUIRE(rows.size() == 3);
  const auto g = split(rows[2], ',');
  CHECK_FALSE(g[3].empty());
  CHECK_FALSE(g[5].empty());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *sample_record(10, true).rel_error_mitigated);
  CHECK(g[5] == buf);
}

TEST_CASE("json round trip is exact") {
  std::vector<SweepRecord> recs{sample_record(5, true), sample_record(10, false), sample_record(75, true)};
  recs[1].converged = false;
  recs[2].e_raw = std::nextafter(recs[2].e_raw, 1e9);
  std::stringstream ss;
  write_json(ss, recs, SweepConfig{});
  CHECK(ss.str().find("\"config\"") != std::string::npos);
  CHECK(ss.str().find("\"mitigation\"") != std::string::npos);
  const auto back = read_json_records(ss);
  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) CHECK(back[k] == recs[k]);

  std::istringstream junk("{ not json");
  CHECK_THROWS_AS(read_json_records(junk), IoError);
}

TEST_CASE("emit to files") {
  const std::vector<SweepRecord> recs{sample_record(5, true), sample_record(10, true)};
  const fs::path csv = scratch("out.csv");
  emit(recs, OutputFormat::Csv, csv, SweepConfig{});
  std::ostringstream expected;
  write_csv(expected, recs);
  CHECK(slurp(csv) == expected.str());

  const fs::path js = scratch("out.json");
  emit(recs, OutputFormat::Json, js, SweepConfig{});
  std::ifstream jf(js);
  CHECK(read_json_records(jf) == recs);

  const fs::path stem = scratch("plot");
  emit(recs, OutputFormat::PlotData, stem, SweepConfig{});
  const auto paths = plotdata_paths(stem, true);
  REQUIRE(paths.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto rows = lines_of(slurp(paths[s]));
    REQUIRE(rows.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
      const auto cols = split(rows[k], '\t');
      REQUIRE(cols.size() == 2);
      CHECK(std::stod(cols[0]) == recs[k].u);
      const double e = s == 0 ? recs[k].e_exact : s == 1 ? recs[k].e_raw : *recs[k].e_mitigated;
      CHECK(std::stod(cols[1]) == e);
    }
  }
  CHECK(plotdata_paths(stem, false).size() == 2);

  CHECK_THROWS_AS(emit(recs, OutputFormat::Csv, "/nonexistent-dir/x.csv", SweepConfig{}), IoError);
  CHECK_THROWS_AS(emit({}, OutputFormat::Csv, csv, SweepConfig{}), DomainError);
  CHECK(parse_output_format("plotdata") == OutputFormat::PlotData);
  CHECK_THROWS_AS(parse_output_format("xml"), ConfigError);
}

TEST_CASE("config file parsing") {
  const std::string text = R"({
    "sites": 6, "electrons": 2, "hopping": 1.0, "interaction": 30,
    "statistics": "spinless-fermion", "u_min": 10, "u_max": 20, "points": 3, "seed": 9, "workers": 2,
    "ansatz": {"kind": "hardware-efficient", "layers": 2},
    "optimizer": {"rho_begin": 0.4, "rho_end": 1e-5, "max_evaluations": 900},
    "noise": {"p1": 0.002, "p2": 0.01, "p_idle": 0.0},
    "mitigation": {"zne": true, "scale_factors": [1, 3, 5, 7], "fit": "richardson", "dd": false}
  })";
  const SweepConfig c = parse_config(text);
  CHECK(c.ring.interaction == 30);
  CHECK(c.ring.statistics == Statistics::SpinlessFermion);
  CHECK(c.u_min == 10);
  CHECK(c.points == 3);
  CHECK(c.seed == 9);
  CHECK(c.workers == 2);
  CHECK(c.ansatz == AnsatzKind::HardwareEfficient);
  CHECK(c.layers == 2);
  CHECK(c.optimizer.max_evaluations == 900);
  REQUIRE(c.noise.has_value());
  CHECK(c.noise->p2 == 0.01);
  CHECK(c.mitigation.scale_factors == std::vector<int>{1, 3, 5, 7});
  CHECK(c.mitigation.fit == ZneFit::Richardson);
  CHECK_FALSE(c.mitigation.dd_enabled);

  // echo then re-read gives the same config
  const SweepConfig again = parse_config(config_to_json(c));
  CHECK(config_to_json(again) == config_to_json(c));

  // file values override the base, absent keys keep it
  SweepConfig base;
  base.points = 7;
  base.seed = 42;
  const SweepConfig merged = parse_config(R"({"seed": 1, "noise": {"enabled": false}})", base);
  CHECK(merged.points == 7);
  CHECK(merged.seed == 1);
  CHECK_FALSE(merged.noise.has_value());

  CHECK_THROWS_AS(parse_config(R"({"sights": 6})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"noise": {"p3": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"points": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"statistics": "anyon"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);

  const fs::path file = scratch("cfg.json");
  std::ofstream(file) << R"({"points": 5, "u_min": 5, "u_max": 25})";
  const SweepConfig loaded = load_config(file);
  CHECK(loaded.points == 5);
  CHECK(loaded.grid().back() == 25.0);
}
