#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mtlab/multimatching.hpp"
#include "mtlab/structure_audit.hpp"

namespace mtlab {

enum class ExperimentKind { kHittingTime, kThresholdScan, kSpreadVerify, kStructureAudit, kMultimatchingScan };

/// Command name, e.g. "hitting-time".
std::string to_string(ExperimentKind kind);
/// Throws std::invalid_argument for an unknown name.
ExperimentKind experiment_kind_from(const std::string& name);
/// Stable numeric id mixed into every trial seed (1..5 in declaration order).
std::uint64_t kind_id(ExperimentKind kind);

/// mix_seed(mix_seed(mix_seed(master, kind_id), n), trial).
std::uint64_t trial_seed(std::uint64_t master, ExperimentKind kind, std::size_t n, std::size_t trial);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kHittingTime;
  std::vector<std::size_t> n_grid;
  std::size_t s = 2;
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0: MTLAB_WORKERS or the OpenMP default

  AuditOptions audit;  // structure-audit

  // multimatching-scan: kept-tuple budgets K * v ln v for every K in factors,
  // v = n in bisect mode and the part size in parts mode
  SchemeMode scheme = SchemeMode::kBisect;
  std::vector<double> factors{8.0};
  std::uint64_t local_steps = 0;
  std::uint64_t node_budget = 200'000;

  // threshold-scan: trials (per n) also solved exactly when s = 2
  std::size_t cross_check_trials = 20;

  // spread-verify
  std::size_t spread_max_k = 3;

  std::string out;    // output prefix; empty writes the summary to stdout
  bool json = false;  // also write .json mirrors

  /// Throws std::invalid_argument when the config cannot run.
  void validate() const;
};

/// Sets one key from the config grammar; throws std::invalid_argument for an
/// unknown key or malformed value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Flat text: one `key = value` per line, `#` starts a comment, lists are
/// comma separated. Later lines override earlier ones.
ExperimentConfig parse_config(std::istream& in);

/// Fixed-column table. Every row has one cell per column; wall_ms, when
/// present, holds one value per row and is written as the last column.
struct Table {
  std::string schema;  // "<name>/<version>", written as the first CSV line
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<double> wall_ms;

  std::size_t column(const std::string& name) const;  // throws if absent
};

/// `#schema=<schema>`, header, rows. Cells are quoted when needed.
void write_csv(std::ostream& out, const Table& table, bool with_wall = true);
/// Array of objects keyed by column name.
void write_json(std::ostream& out, const Table& table, bool with_wall = true);
/// Inverse of write_csv. A trailing wall_ms column is split off into wall_ms.
Table read_csv(std::istream& in);

struct ExperimentResult {
  Table records;
  Table summary;
  std::size_t violations = 0;
  std::vector<std::string> notes;  // parameter flags and similar remarks
};

ExperimentResult run_hitting_time(const ExperimentConfig& config);
ExperimentResult run_threshold_scan(const ExperimentConfig& config);
ExperimentResult run_spread_verify(const ExperimentConfig& config);
ExperimentResult run_structure_audit(const ExperimentConfig& config);
ExperimentResult run_multimatching_scan(const ExperimentConfig& config);

/// Validates the config and dispatches on its kind.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes <out>.records.csv and <out>.summary.csv (plus .json mirrors when
/// requested). Returns the paths written.
std::vector<std::string> write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

/// Smallest m at which the success rate reaches 1/2, linearly interpolated
/// between grid points; negative if it never does. `ms` ascending.
double m50_estimate(const std::vector<double>& ms, const std::vector<double>& rates);

/// Kept-tuple budget ceil(K v ln v) for the scan.
std::size_t scan_budget(const PartitionScheme& scheme, double factor);

}  // namespace mtlab
