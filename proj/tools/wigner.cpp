// wigner: exact, vqe and sweep runs on the Coulomb ring from the command line.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wigner/errors.hpp"
#include "wigner/exact.hpp"
#include "wigner/sweep.hpp"

namespace {

using namespace wigner;

constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitIo = 4;

/// Flag values; unset ones leave the file/default value alone.
struct Overrides {
  std::string config;
  std::string out = "-";
  std::string format;
  std::string dump_hamiltonian;
  std::string dump_circuit;
  std::string history;

  std::optional<int> sites, electrons, points, layers, max_evaluations, workers;
  std::optional<double> hopping, interaction, u_min, u_max, rho_begin, rho_end, p1, p2, p_idle;
  std::optional<std::string> statistics, ansatz, fit;
  std::optional<std::uint64_t> seed;
  std::optional<Bitmask> initial_state;
  std::optional<std::vector<int>> scale_factors;
  std::optional<bool> noise, zne, dd;
};

void add_common(CLI::App* cmd, Overrides& o, bool sweep) {
  cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output path ('-' for stdout)");
  cmd->add_option("--format", o.format, sweep ? "csv | json | plotdata" : "text | json");
  cmd->add_option("--dump-hamiltonian", o.dump_hamiltonian, "write the Pauli Hamiltonian here");
  cmd->add_option("--sites", o.sites);
  cmd->add_option("--electrons", o.electrons);
  cmd->add_option("--hopping", o.hopping);
  cmd->add_option("--statistics", o.statistics, "hardcore-boson | spinless-fermion");
  if (sweep) {
    cmd->add_option("--u-min", o.u_min);
    cmd->add_option("--u-max", o.u_max);
    cmd->add_option("--points", o.points);
    cmd->add_option("--workers", o.workers, "parallel sweep points (default: $WIGNER_WORKERS or 1)");
  } else {
    cmd->add_option("-U,--interaction", o.interaction);
  }
}

void add_vqe_options(CLI::App* cmd, Overrides& o, bool sweep) {
  cmd->add_option("--ansatz", o.ansatz, "number-preserving | hardware-efficient");
  cmd->add_option("--layers", o.layers);
  cmd->add_option("--initial-state", o.initial_state, "occupation bitmask, qubit 0 = least significant bit");
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--rho-begin", o.rho_begin);
  cmd->add_option("--rho-end", o.rho_end);
  cmd->add_option("--max-evaluations", o.max_evaluations);
  cmd->add_flag("--noise,!--no-noise", o.noise, "simulate the noisy device");
  cmd->add_option("--p1", o.p1);
  cmd->add_option("--p2", o.p2);
  cmd->add_option("--p-idle", o.p_idle);
  cmd->add_flag("--zne,!--no-zne", o.zne);
  cmd->add_option("--scale-factors", o.scale_factors)->delimiter(',');
  cmd->add_option("--fit", o.fit, "linear | richardson");
  cmd->add_flag("--dd,!--no-dd", o.dd);
  if (!sweep) {
    cmd->add_option("--dump-circuit", o.dump_circuit, "write the optimised circuit here");
    cmd->add_option("--history", o.history, "write the objective trace here");
  }
}

template <class T, class U>
void set_if(const std::optional<T>& src, U& dst) {
  if (src) dst = *src;
}

int env_workers() {
  const char* env = std::getenv("WIGNER_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("WIGNER_WORKERS must be a positive integer");
  return static_cast<int>(n);
}

SweepConfig resolve(const Overrides& o) {
  SweepConfig c;
  c.workers = env_workers();
  if (!o.config.empty()) c = load_config(o.config, c);

  set_if(o.sites, c.ring.sites);
  set_if(o.electrons, c.ring.electrons);
  set_if(o.hopping, c.ring.hopping);
  set_if(o.interaction, c.ring.interaction);
  if (o.statistics) c.ring.statistics = parse_statistics(*o.statistics);
  set_if(o.u_min, c.u_min);
  set_if(o.u_max, c.u_max);
  set_if(o.points, c.points);
  set_if(o.workers, c.workers);
  set_if(o.seed, c.seed);
  if (o.ansatz) c.ansatz = parse_ansatz_kind(*o.ansatz);
  set_if(o.layers, c.layers);
  if (o.initial_state) c.initial_state = *o.initial_state;
  set_if(o.rho_begin, c.optimizer.rho_begin);
  set_if(o.rho_end, c.optimizer.rho_end);
  set_if(o.max_evaluations, c.optimizer.max_evaluations);

  if (o.noise) c.noise = *o.noise ? std::optional<NoiseModel>(c.noise.value_or(NoiseModel{})) : std::nullopt;
  if (o.p1 || o.p2 || o.p_idle) {
    if (!c.noise) throw ConfigError("noise rates given but noise is disabled");
    set_if(o.p1, c.noise->p1);
    set_if(o.p2, c.noise->p2);
    set_if(o.p_idle, c.noise->p_idle);
  }
  set_if(o.zne, c.mitigation.zne_enabled);
  set_if(o.scale_factors, c.mitigation.scale_factors);
  if (o.fit) c.mitigation.fit = parse_zne_fit(*o.fit);
  set_if(o.dd, c.mitigation.dd_enabled);
  return c;
}

/// Runs `write` against stdout for "-", otherwise against the named file.
template <class F>
void write_to(const std::string& path, F&& write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write(f);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

void dump_hamiltonian(const Overrides& o, const RingConfig& ring) {
  if (o.dump_hamiltonian.empty()) return;
  write_to(o.dump_hamiltonian, [&](std::ostream& os) { write_pauli_hamiltonian(os, build_pauli_hamiltonian(ring)); });
}

std::string text_or_json(const std::string& format) {
  if (format.empty() || format == "text") return "text";
  if (format == "json") return "json";
  throw ConfigError("format must be text or json for this command");
}

int run_exact(const Overrides& o) {
  const SweepConfig c = resolve(o);
  c.ring.validate();
  const std::string format = text_or_json(o.format);
  dump_hamiltonian(o, c.ring);

  const SectorHamiltonian h = build_sector_hamiltonian(c.ring);
  const GroundState g = ground_state(h);
  const ClassicalMinimum cm = diagonal_minimum(h);
  std::optional<ThresholdReport> th;
  if (c.ring.sites % 2 == 0) th = analyze_threshold(c.ring);

  write_to(o.out, [&](std::ostream& os) {
    if (format == "json") {
      nlohmann::json j = {{"U", c.ring.interaction},
                          {"dimension", h.dimension()},
                          {"energy", g.energy},
                          {"amplitudes", g.amplitudes},
                          {"basis", h.basis},
                          {"classical_state", cm.bitmask},
                          {"classical_energy", cm.energy}};
      if (th) {
        j["v_nearest"] = th->v_nearest;
        j["v_antipodal"] = th->v_antipodal;
        j["bandwidth"] = th->bandwidth;
        j["localised"] = th->localised;
      }
      os << j.dump(2) << '\n';
      return;
    }
    char buf[64];
    auto line = [&](const char* key, double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << key << " = " << buf << '\n';
    };
    line("U", c.ring.interaction);
    os << "dimension = " << h.dimension() << '\n';
    line("energy", g.energy);
    os << "classical_state = " << cm.bitmask << '\n';
    line("classical_energy", cm.energy);
    if (th) {
      line("v_nearest", th->v_nearest);
      line("v_antipodal", th->v_antipodal);
      line("bandwidth", th->bandwidth);
      os << "localised = " << (th->localised ? "true" : "false") << '\n';
    }
  });
  return 0;
}

int run_vqe_command(const Overrides& o) {
  SweepConfig c = resolve(o);
  c.u_min = c.u_max = c.ring.interaction;
  c.points = 1;
  c.validate();
  const std::string format = text_or_json(o.format);
  dump_hamiltonian(o, c.ring);

  const AnsatzSpec spec = resolve_ansatz(c, c.ring);
  OptimizerConfig opt = c.optimizer;
  opt.seed = c.seed;
  VqeResult r = run_vqe(c.ring, spec, opt, c.noise, std::nullopt);
  if (c.noise && c.mitigation.any())
    r.mitigation = mitigated_expectation(build_ansatz(spec, r.parameters), vqe_observable(c.ring, spec), *c.noise,
                                         c.mitigation);
  const double exact = ground_state(build_sector_hamiltonian(c.ring)).energy;

  write_to(o.out, [&](std::ostream& os) {
    if (format == "json") {
      nlohmann::json j = {{"U", c.ring.interaction},
                          {"E_exact", exact},
                          {"E_raw", r.energy},
                          {"rel_error_raw_pct", relative_error(r.energy, exact)},
                          {"converged", r.converged},
                          {"evaluations", r.evaluations},
                          {"parameters", r.parameters},
                          {"config", nlohmann::json::parse(config_to_json(c))}};
      if (r.mitigation) {
        j["E_mitigated"] = r.mitigation->value;
        j["rel_error_mitigated_pct"] = relative_error(r.mitigation->value, exact);
        j["mitigation"] = {{"scale_factors", r.mitigation->scale_factors},
                           {"energies", r.mitigation->energies},
                           {"fit_coefficients", r.mitigation->coefficients},
                           {"extrapolated", r.mitigation->value}};
      }
      os << j.dump(2) << '\n';
      return;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", exact);
    os << "exact_energy = " << buf << '\n';
    write_vqe_result(os, r);
  });
  if (!o.history.empty()) write_to(o.history, [&](std::ostream& os) { write_vqe_history(os, r); });
  if (!o.dump_circuit.empty())
    write_to(o.dump_circuit, [&](std::ostream& os) { write_circuit(os, build_ansatz(spec, r.parameters)); });

  if (!r.converged) {
    std::cerr << "wigner: optimizer stopped after " << r.evaluations << " evaluations without converging\n";
    return kExitNotConverged;
  }
  return 0;
}

int run_sweep_command(const Overrides& o) {
  const SweepConfig c = resolve(o);
  c.validate();
  const OutputFormat format = parse_output_format(o.format.empty() ? "csv" : o.format);
  if (format == OutputFormat::PlotData && o.out == "-") throw ConfigError("plotdata needs --out <stem>");
  dump_hamiltonian(o, c.ring);

  const std::vector<SweepRecord> records = run_sweep(c);
  if (o.out == "-") {
    if (format == OutputFormat::Csv)
      write_csv(std::cout, records);
    else
      write_json(std::cout, records, c);
    std::cout.flush();
  } else {
    emit(records, format, o.out, c);
  }
  for (const auto& r : records) {
    if (!r.converged)
      std::fprintf(stderr, "wigner: U=%.6g stopped at the evaluation cap (%d)\n", r.u, r.evaluations);
  }
  return 0;
}

int exit_code_of(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const SweepError& s) {
    return exit_code_of(s.cause());
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const DomainError&) {
    return kExitConfig;
  } catch (const OptimizerError&) {
    return kExitNotConverged;
  } catch (const ConvergenceError&) {
    return kExitNotConverged;
  } catch (const IoError&) {
    return kExitIo;
  } catch (...) {
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coulomb ring ground states: exact diagonalisation, VQE, and mitigated U sweeps"};
  app.require_subcommand(1);
  Overrides o;

  auto* exact = app.add_subcommand("exact", "exact ground state at one U");
  add_common(exact, o, false);

  auto* vqe = app.add_subcommand("vqe", "VQE at one U");
  add_common(vqe, o, false);
  add_vqe_options(vqe, o, false);

  auto* sweep = app.add_subcommand("sweep", "exact, raw and mitigated energies over a U grid");
  add_common(sweep, o, true);
  add_vqe_options(sweep, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*exact) return run_exact(o);
    if (*vqe) return run_vqe_command(o);
    return run_sweep_command(o);
  } catch (const std::exception& e) {
    std::cerr << "wigner: " << e.what() << '\n';
    return exit_code_of(std::current_exception());
  }
}
