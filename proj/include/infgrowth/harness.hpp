#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infgrowth/detectors.hpp"
#include "infgrowth/growth.hpp"
#include "infgrowth/metrics.hpp"
#include "infgrowth/sampling.hpp"
#include "infgrowth/templates.hpp"

namespace infgrowth {

/// One evaluated cell. Column order in CSV follows field order.
struct SweepRow {
  std::string model;  // "model1" | "model2"
  double param = 0;   // k or beta
  int replicate = 0;
  std::uint64_t seed = 0;
  std::size_t snapshot = 0;
  std::size_t kb_facts = 0;
  std::size_t axiom_count = 0;
  std::size_t or_nodes = 0;
  double avg_degree = 0;
  double alpha = 0;
  std::size_t queries = 0;
  std::size_t answered = 0;
  double answered_fraction = 0;
  std::size_t total_answers = 0;
  bool threshold_hit = false;
  double wall_time_ms = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// A cell that could not be evaluated.
struct CellError {
  std::string model;
  double param = 0;
  int replicate = 0;
  std::size_t snapshot = 0;
  std::string message;
};

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProfileMode { kNone, kFirstReplicate, kAll };

struct ExperimentConfig {
  // Inputs: either a KB file or a synthetic configuration.
  std::optional<std::string> kb_path;
  std::optional<std::string> axioms_path;  // extra rules; the KB file's own rules are always used
  std::optional<std::string> templates_path;
  std::optional<SynthConfig> synth;

  // Snapshot schedule; empty sizes means a single snapshot of the whole KB.
  std::vector<std::size_t> sizes;
  std::uint64_t snapshot_seed = 1;
  AblationOrder order = AblationOrder::kUniform;

  std::vector<int> model1_k{2, 3, 4, 5, 6, 7};
  std::vector<double> model2_beta{10, 15, 20, 30, 40, 50};
  BetaRounding rounding = BetaRounding::kCeil;
  int replicates = 7;
  std::uint64_t seed = 1;
  int depth = 10;
  bool genlpreds = true;
  int threads = 1;
  double theta = kDefaultThreshold;
  bool continue_on_error = false;
  /// Off by default so that repeated runs emit identical bytes.
  bool timing = false;
  ProfileMode profiles = ProfileMode::kFirstReplicate;
  TransitionParams transition;
  DegenerateParams degenerate;
  double match_tolerance = 0.1;

  /// Relative paths resolve against `base_dir`.
  static ExperimentConfig from_json(std::string_view json, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct ExperimentInputs {
  KnowledgeBase kb;
  AxiomSet axioms;
  std::vector<QueryTemplate> templates;
};

/// Reads or generates the KB, axioms and templates a config refers to.
ExperimentInputs load_inputs(const ExperimentConfig& config);

struct SeriesReport {
  std::string label;
  std::string model;
  double param = 0;
  std::optional<std::size_t> snapshot;  // set for within-snapshot series
  std::vector<std::pair<double, double>> points;
  DetectorReport report;
};

struct ProfileReport {
  std::string name;
  std::size_t snapshot = 0;
  std::string model;
  double param = 0;
  int replicate = 0;
  std::map<int, std::size_t> profile;
  DetectorReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<CellError> errors;
  std::vector<ProfileReport> profiles;
  std::vector<SeriesReport> series;
  std::vector<std::size_t> snapshot_sizes;  // KB facts per snapshot
};

/// Every (snapshot x model x parameter x replicate) cell. One sample per
/// (model, parameter, replicate) is drawn from the full graph and evaluated
/// against each snapshot. Rows come out sorted by snapshot, model, parameter
/// and replicate. Throws SweepError for an infeasible cell unless
/// `continue_on_error` is set, in which case the cell goes to `errors`.
SweepResult run_sweep(const ExperimentConfig& config, const ExperimentInputs& inputs);

/// Transition detection over (alpha, fraction) series: the replicates of each
/// (snapshot, model, parameter), and the per-snapshot means of each (model,
/// parameter) when there are at least three snapshots.
std::vector<SeriesReport> detect_series(const std::vector<SweepRow>& rows, TransitionParams params);

struct ComparisonRow {
  std::size_t snapshot = 0;
  std::size_t kb_facts = 0;
  std::size_t pairs = 0;
  double mean_degree = 0;
  double model1_answers = 0;
  double model2_answers = 0;
  double change_pct = 0;  // (model2 - model1) / model1 * 100
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<std::string> warnings;
};

/// Per snapshot: greedy matched pairs on average degree, then mean total
/// answers of each model over matched samples only.
Comparison compare_models(const std::vector<SweepRow>& rows, double tolerance = 0.1);

/// Mean answered fraction per (snapshot, model, parameter).
struct PerformanceRow {
  std::size_t snapshot = 0;
  std::size_t kb_facts = 0;
  std::string model;
  double param = 0;
  std::size_t replicates = 0;
  double mean_alpha = 0;
  double mean_fraction = 0;
  double hit_share = 0;  // replicates at or above the threshold
};
std::vector<PerformanceRow> performance_table(const std::vector<SweepRow>& rows);

// --- Serialization ---------------------------------------------------------

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string sweep_csv_header();
std::string emit_csv(const std::vector<SweepRow>& rows);
std::string emit_json(const std::vector<SweepRow>& rows);
/// Inverse of emit_csv. Throws std::runtime_error with the line number.
std::vector<SweepRow> parse_sweep_csv(std::string_view text);

enum class EmitFormat { kCsv, kJson };
void emit(const std::vector<SweepRow>& rows, const std::filesystem::path& path, EmitFormat format);

std::string emit_csv(const Comparison& comparison);
std::string emit_csv(const std::vector<PerformanceRow>& rows);
std::string emit_csv(const std::vector<CellError>& errors);
std::string emit_profile_csv(const std::map<int, std::size_t>& profile);
std::string detectors_json(const SweepResult& result);

/// sweep.csv, performance.csv, comparison.csv, errors.csv, detectors.json and
/// profiles/*.csv under `dir`.
void write_sweep_outputs(const SweepResult& result, const ExperimentConfig& config, const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace infgrowth
