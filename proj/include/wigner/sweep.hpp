#pragma once

// U-sweep orchestration, run configuration, and result emission.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wigner/cobyla.hpp"
#include "wigner/mitigation.hpp"
#include "wigner/model.hpp"
#include "wigner/vqe.hpp"

namespace wigner {

/// Everything a run needs. `ring.interaction` is the single-point U used by
/// the exact and vqe commands; the sweep overrides it per point.
struct SweepConfig {
  double u_min = 5.0;
  double u_max = 75.0;
  int points = 15;
  RingConfig ring;
  AnsatzKind ansatz = AnsatzKind::NumberPreserving;
  int layers = 3;
  std::optional<Bitmask> initial_state;  // absent: classical minimum per U
  OptimizerConfig optimizer;
  std::optional<NoiseModel> noise = NoiseModel{};
  MitigationConfig mitigation;
  std::uint64_t seed = 0;
  int workers = 1;

  /// Throws ConfigError with a description of the first violated invariant.
  void validate() const;
  /// Inclusive, evenly spaced; the last point is exactly u_max.
  std::vector<double> grid() const;
};

/// Ansatz for one U: qubits = sites, initial state resolved against the
/// classical minimum when the config leaves it open.
AnsatzSpec resolve_ansatz(const SweepConfig& cfg, const RingConfig& ring);

/// Seed of sweep point k, mixed from the run seed.
std::uint64_t point_seed(std::uint64_t seed, std::size_t index);

struct SweepRecord {
  double u = 0.0;
  double e_exact = 0.0;
  double e_raw = 0.0;
  std::optional<double> e_mitigated;
  double rel_error_raw = 0.0;                  // percent
  std::optional<double> rel_error_mitigated;   // percent
  int evaluations = 0;
  bool converged = false;
  std::optional<MitigationDiagnostics> mitigation;

  friend bool operator==(const SweepRecord&, const SweepRecord&);
};

/// A sweep point failed; `u()` names it, `cause()` holds the original error.
class SweepError : public std::runtime_error {
 public:
  SweepError(double u, std::exception_ptr cause, const std::string& what)
      : std::runtime_error(what), u_(u), cause_(std::move(cause)) {}

  double u() const noexcept { return u_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  double u_;
  std::exception_ptr cause_;
};

/// One record: exact energy, VQE under the configured noise (raw), and the
/// mitigated estimate at the VQE optimum when noise and mitigation are both on.
SweepRecord run_point(const SweepConfig& cfg, double u, std::uint64_t seed);

/// All grid points on up to cfg.workers threads; records come back sorted by U.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

enum class OutputFormat { Csv, Json, PlotData };

OutputFormat parse_output_format(std::string_view text);

/// Header `U,E_exact,E_raw,E_mitigated,rel_error_raw_pct,rel_error_mitigated_pct`,
/// values to 6 significant digits, absent values as empty fields.
void write_csv(std::ostream& os, const std::vector<SweepRecord>& records);
void write_json(std::ostream& os, const std::vector<SweepRecord>& records, const SweepConfig& cfg);
std::vector<SweepRecord> read_json_records(std::istream& is);

/// Files written for plot data from destination `stem`: stem_exact.dat,
/// stem_raw.dat and (when present) stem_mitigated.dat.
std::vector<std::filesystem::path> plotdata_paths(const std::filesystem::path& stem, bool mitigated);

/// Writes `records` to `destination`. Throws IoError when it cannot.
void emit(const std::vector<SweepRecord>& records, OutputFormat format, const std::filesystem::path& destination,
          const SweepConfig& cfg);

/// JSON configuration: flat ring/sweep keys plus `ansatz`, `optimizer`,
/// `noise` and `mitigation` sections. Unknown keys are rejected.
SweepConfig parse_config(std::string_view json_text, SweepConfig base = {});
SweepConfig load_config(const std::filesystem::path& path, SweepConfig base = {});
std::string config_to_json(const SweepConfig& cfg);

}  // namespace wigner
