#include "wigner/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wigner/errors.hpp"
#include "wigner/exact.hpp"

namespace wigner {

using nlohmann::json;

bool operator==(const SweepRecord& a, const SweepRecord& b) {
  auto same_diag = [](const std::optional<MitigationDiagnostics>& x, const std::optional<MitigationDiagnostics>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->scale_factors == y->scale_factors && x->energies == y->energies &&
           x->coefficients == y->coefficients && x->value == y->value;
  };
  return a.u == b.u && a.e_exact == b.e_exact && a.e_raw == b.e_raw && a.e_mitigated == b.e_mitigated &&
         a.rel_error_raw == b.rel_error_raw && a.rel_error_mitigated == b.rel_error_mitigated &&
         a.evaluations == b.evaluations && a.converged == b.converged && same_diag(a.mitigation, b.mitigation);
}

void SweepConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!std::isfinite(u_min) || !std::isfinite(u_max)) fail("u_min and u_max must be finite");
  if (u_min < 0.0) fail("u_min must be >= 0");
  if (u_min > u_max) fail("u_min must not exceed u_max");
  if (points < 1) fail("points must be >= 1");
  if (points == 1 && u_min != u_max) fail("a single-point sweep needs u_min == u_max");
  if (layers < 1) fail("layers must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  try {
    ring.validate();
    AnsatzSpec probe = resolve_ansatz(*this, ring);
    probe.validate();
    optimizer.validate(probe.parameter_count());
    if (noise) noise->validate();
    mitigation.validate();
  } catch (const DomainError& e) {
    fail(e.what());
  }
  if (initial_state && ansatz == AnsatzKind::NumberPreserving &&
      std::popcount(*initial_state) != ring.electrons)
    fail("initial_state must have exactly `electrons` bits set");
}

std::vector<double> SweepConfig::grid() const {
  std::vector<double> u(static_cast<std::size_t>(points));
  if (points == 1) {
    u[0] = u_min;
    return u;
  }
  const double step = (u_max - u_min) / (points - 1);
  for (int k = 0; k < points; ++k) u[static_cast<std::size_t>(k)] = u_min + k * step;
  u.back() = u_max;
  return u;
}

AnsatzSpec resolve_ansatz(const SweepConfig& cfg, const RingConfig& ring) {
  AnsatzSpec spec;
  spec.kind = cfg.ansatz;
  spec.layers = cfg.layers;
  spec.qubits = ring.sites;
  if (cfg.ansatz == AnsatzKind::HardwareEfficient) {
    spec.initial_state = 0;
  } else if (cfg.initial_state) {
    spec.initial_state = *cfg.initial_state;
  } else {
    spec.initial_state = diagonal_minimum(build_sector_hamiltonian(ring)).bitmask;
  }
  return spec;
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SweepRecord run_point(const SweepConfig& cfg, double u, std::uint64_t seed) {
  RingConfig ring = cfg.ring;
  ring.interaction = u;
  const AnsatzSpec spec = resolve_ansatz(cfg, ring);
  OptimizerConfig opt = cfg.optimizer;
  opt.seed = seed;

  SweepRecord r;
  r.u = u;
  r.e_exact = ground_state(build_sector_hamiltonian(ring)).energy;
  const VqeResult vqe = run_vqe(ring, spec, opt, cfg.noise, std::nullopt);
  r.e_raw = vqe.energy;
  r.evaluations = vqe.evaluations;
  r.converged = vqe.converged;
  r.rel_error_raw = relative_error(r.e_raw, r.e_exact);
  if (cfg.noise && cfg.mitigation.any()) {
    const Circuit best = build_ansatz(spec, vqe.parameters);
    r.mitigation = mitigated_expectation(best, vqe_observable(ring, spec), *cfg.noise, cfg.mitigation);
    r.e_mitigated = r.mitigation->value;
    r.rel_error_mitigated = relative_error(*r.e_mitigated, r.e_exact);
  }
  return r;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<double> us = cfg.grid();
  std::vector<SweepRecord> out(us.size());
  std::vector<std::exception_ptr> errors(us.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < us.size(); k = next++) {
      try {
        out[k] = run_point(cfg, us[k], point_seed(cfg.seed, k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), us.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < us.size(); ++k) {
    if (!errors[k]) continue;
    std::string msg;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
      msg = "unknown error";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "sweep point U=%.6g failed: ", us[k]);
    throw SweepError(us[k], errors[k], buf + msg);
  }
  std::stable_sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) { return a.u < b.u; });
  return out;
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  if (text == "plotdata") return OutputFormat::PlotData;
  throw ConfigError("unknown output format '" + std::string(text) + "'");
}

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json noise_json(const std::optional<NoiseModel>& n) {
  if (!n) return {{"enabled", false}};
  return {{"enabled", true}, {"p1", n->p1}, {"p2", n->p2}, {"p_idle", n->p_idle}};
}

json config_json(const SweepConfig& c) {
  json ansatz = {{"kind", to_string(c.ansatz)}, {"layers", c.layers}};
  ansatz["initial_state"] = c.initial_state ? json(*c.initial_state) : json(nullptr);
  return {
      {"sites", c.ring.sites},
      {"electrons", c.ring.electrons},
      {"hopping", c.ring.hopping},
      {"interaction", c.ring.interaction},
      {"statistics", to_string(c.ring.statistics)},
      {"u_min", c.u_min},
      {"u_max", c.u_max},
      {"points", c.points},
      {"seed", c.seed},
      {"workers", c.workers},
      {"ansatz", ansatz},
      {"optimizer",
       {{"rho_begin", c.optimizer.rho_begin},
        {"rho_end", c.optimizer.rho_end},
        {"max_evaluations", c.optimizer.max_evaluations}}},
      {"noise", noise_json(c.noise)},
      {"mitigation",
       {{"zne", c.mitigation.zne_enabled},
        {"scale_factors", c.mitigation.scale_factors},
        {"fit", to_string(c.mitigation.fit)},
        {"dd", c.mitigation.dd_enabled}}},
  };
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void take(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "U,E_exact,E_raw,E_mitigated,rel_error_raw_pct,rel_error_mitigated_pct\n";
  for (const auto& r : records) {
    os << g6(r.u) << ',' << g6(r.e_exact) << ',' << g6(r.e_raw) << ',';
    if (r.e_mitigated) os << g6(*r.e_mitigated);
    os << ',' << g6(r.rel_error_raw) << ',';
    if (r.rel_error_mitigated) os << g6(*r.rel_error_mitigated);
    os << '\n';
  }
}

void write_json(std::ostream& os, const std::vector<SweepRecord>& records, const SweepConfig& cfg) {
  json rows = json::array();
  json diags = json::array();
  for (const auto& r : records) {
    rows.push_back({{"U", r.u},
                    {"E_exact", r.e_exact},
                    {"E_raw", r.e_raw},
                    {"E_mitigated", optional_number(r.e_mitigated)},
                    {"rel_error_raw_pct", r.rel_error_raw},
                    {"rel_error_mitigated_pct", optional_number(r.rel_error_mitigated)},
                    {"evaluations", r.evaluations},
                    {"converged", r.converged}});
    if (r.mitigation) {
      diags.push_back({{"U", r.u},
                       {"scale_factors", r.mitigation->scale_factors},
                       {"energies", r.mitigation->energies},
                       {"fit_coefficients", r.mitigation->coefficients},
                       {"extrapolated", r.mitigation->value}});
    }
  }
  json doc = {{"config", config_json(cfg)}, {"records", rows}, {"mitigation", diags}};
  os << doc.dump(2) << '\n';
}

std::vector<SweepRecord> read_json_records(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed result JSON: ") + e.what());
  }
  std::vector<SweepRecord> out;
  for (const json& row : doc.at("records")) {
    SweepRecord r;
    r.u = row.at("U").get<double>();
    r.e_exact = row.at("E_exact").get<double>();
    r.e_raw = row.at("E_raw").get<double>();
    r.e_mitigated = read_optional(row, "E_mitigated");
    r.rel_error_raw = row.at("rel_error_raw_pct").get<double>();
    r.rel_error_mitigated = read_optional(row, "rel_error_mitigated_pct");
    r.evaluations = row.at("evaluations").get<int>();
    r.converged = row.at("converged").get<bool>();
    out.push_back(std::move(r));
  }
  for (const json& d : doc.at("mitigation")) {
    const double u = d.at("U").get<double>();
    auto it = std::find_if(out.begin(), out.end(), [u](const SweepRecord& r) { return r.u == u; });
    if (it == out.end()) throw IoError("mitigation entry without a matching record");
    MitigationDiagnostics m;
    m.scale_factors = d.at("scale_factors").get<std::vector<int>>();
    m.energies = d.at("energies").get<std::vector<double>>();
    m.coefficients = d.at("fit_coefficients").get<std::vector<double>>();
    m.value = d.at("extrapolated").get<double>();
    it->mitigation = std::move(m);
  }
  return out;
}

std::vector<std::filesystem::path> plotdata_paths(const std::filesystem::path& stem, bool mitigated) {
  std::vector<std::filesystem::path> out;
  for (const char* series : {"exact", "raw", "mitigated"}) {
    if (std::string_view(series) == "mitigated" && !mitigated) continue;
    std::filesystem::path p = stem;
    p += std::string("_") + series + ".dat";
    out.push_back(std::move(p));
  }
  return out;
}

void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::filesystem::path& destination,
          const SweepConfig& cfg) {
  if (records.empty()) throw DomainError("nothing to emit");
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
    return f;
  };
  auto finish = [](std::ofstream& f, const std::filesystem::path& p) {
    f.flush();
    if (!f) throw IoError("write to '" + p.string() + "' failed");
  };

  if (format == OutputFormat::PlotData) {
    const bool mitigated = std::all_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.e_mitigated.has_value(); });
    const auto paths = plotdata_paths(destination, mitigated);
    for (std::size_t s = 0; s < paths.size(); ++s) {
      auto f = open(paths[s]);
      for (const auto& r : records) {
        const double e = s == 0 ? r.e_exact : s == 1 ? r.e_raw : *r.e_mitigated;
        f << g17(r.u) << '\t' << g17(e) << '\n';
      }
      finish(f, paths[s]);
    }
    return;
  }
  auto f = open(destination);
  if (format == OutputFormat::Csv)
    write_csv(f, records);
  else
    write_json(f, records, cfg);
  finish(f, destination);
}

SweepConfig parse_config(std::string_view json_text, SweepConfig c) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(doc,
               {"sites", "electrons", "hopping", "interaction", "statistics", "u_min", "u_max", "points", "seed",
                "workers", "ansatz", "optimizer", "noise", "mitigation"},
               "config");
    take(doc, "sites", c.ring.sites);
    take(doc, "electrons", c.ring.electrons);
    take(doc, "hopping", c.ring.hopping);
    take(doc, "interaction", c.ring.interaction);
    if (doc.contains("statistics")) c.ring.statistics = parse_statistics(doc.at("statistics").get<std::string>());
    take(doc, "u_min", c.u_min);
    take(doc, "u_max", c.u_max);
    take(doc, "points", c.points);
    take(doc, "seed", c.seed);
    take(doc, "workers", c.workers);

    if (doc.contains("ansatz")) {
      const json& a = doc.at("ansatz");
      check_keys(a, {"kind", "layers", "initial_state"}, "ansatz");
      if (a.contains("kind")) c.ansatz = parse_ansatz_kind(a.at("kind").get<std::string>());
      take(a, "layers", c.layers);
      if (a.contains("initial_state")) {
        const json& s = a.at("initial_state");
        if (s.is_null())
          c.initial_state.reset();
        else
          c.initial_state = s.get<Bitmask>();
      }
    }
    if (doc.contains("optimizer")) {
      const json& o = doc.at("optimizer");
      check_keys(o, {"rho_begin", "rho_end", "max_evaluations"}, "optimizer");
      take(o, "rho_begin", c.optimizer.rho_begin);
      take(o, "rho_end", c.optimizer.rho_end);
      take(o, "max_evaluations", c.optimizer.max_evaluations);
    }
    if (doc.contains("noise")) {
      const json& n = doc.at("noise");
      check_keys(n, {"enabled", "p1", "p2", "p_idle"}, "noise");
      bool enabled = c.noise.has_value();
      take(n, "enabled", enabled);
      NoiseModel model = c.noise.value_or(NoiseModel{});
      take(n, "p1", model.p1);
      take(n, "p2", model.p2);
      take(n, "p_idle", model.p_idle);
      c.noise = enabled ? std::optional<NoiseModel>(model) : std::nullopt;
    }
    if (doc.contains("mitigation")) {
      const json& m = doc.at("mitigation");
      check_keys(m, {"zne", "scale_factors", "fit", "dd"}, "mitigation");
      take(m, "zne", c.mitigation.zne_enabled);
      take(m, "scale_factors", c.mitigation.scale_factors);
      if (m.contains("fit")) c.mitigation.fit = parse_zne_fit(m.at("fit").get<std::string>());
      take(m, "dd", c.mitigation.dd_enabled);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

SweepConfig load_config(const std::filesystem::path& path, SweepConfig base) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string config_to_json(const SweepConfig& cfg) { return config_json(cfg).dump(2); }

}  // namespace wigner
