#pragma once

#include "cpdp/corpus.hpp"
#include "cpdp/learner.hpp"
#include "cpdp/predictors.hpp"
#include "cpdp/preprocess.hpp"
#include "cpdp/stats.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cpdp {

struct DatasetEntry {
  std::string name;
  std::string family;
  std::filesystem::path path;
  /// "csv" or "arff"; inferred from the file extension when empty.
  std::string format;
  SchemaConfig schema;
};

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  EngineParams engine;
  std::vector<Method> methods{Method::CpdpPure, Method::IfsOur, Method::IfsMin, Method::Mix};
  std::filesystem::path output_dir = "cpdp-out";
  std::size_t workers = 1;
  /// Recorded in the manifest; the pipeline is deterministic so repeats coincide.
  int mix_repeats = 1;
  /// Canonical JSON of the parsed configuration, used for the manifest hash.
  std::string canonical_json;
};

/// Parses a JSON experiment configuration. Relative dataset paths resolve
/// against `base_dir`. Throws ConfigError on schema violations.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             const nlohmann::json& overrides = nlohmann::json::object());

/// Loads every dataset; a failure names the offending dataset.
std::vector<Project> load_datasets(const ExperimentConfig& config);

/// One executed (or failed) pair run.
struct ResultRow {
  std::string source;
  std::string second_source;
  std::string target;
  Method method = Method::CpdpPure;
  bool ok = false;
  std::string error;
  std::size_t instances = 0;
  ConfusionMatrix confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

ResultRow to_row(const PredictionOutcome& outcome);

struct BestEntry {
  std::string target;
  Method method = Method::CpdpPure;
  std::string source;
  std::string second_source;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

/// Highest f-measure per (method, target) among successful rows; ties go to
/// the lexicographically smallest source. Methods follow enum order, targets
/// their first appearance in `rows`.
std::vector<BestEntry> best_per_target(const std::vector<ResultRow>& rows);

struct MethodComparison {
  Method a = Method::IfsOur;
  Method b = Method::IfsMin;
  std::vector<std::string> targets;
  std::optional<ComparisonResult> result;
  std::string note;
};

/// Wilcoxon signed-rank and Cliff's delta over the best-per-target f-measures
/// of two methods, paired by target.
MethodComparison compare_methods(const std::vector<BestEntry>& best, Method a, Method b);

struct DprRow {
  std::string target;
  std::string source;  // best cpdp_pure source
  std::optional<double> dpr;
  std::optional<double> f_pure;
  std::optional<double> f_mix;
  std::optional<double> improvement;
  bool low_dpr = false;
  /// Correlation between DPR and f-measure across the target's candidate sources.
  std::optional<double> pearson_r;
  std::optional<double> pearson_p;
  std::size_t candidates = 0;
  std::string note;
};

/// Threshold below which the hybrid model tends to help (strict inequality).
inline constexpr double kLowDprThreshold = 0.64;

/// Per-target DPR analysis. `correlation_method` selects whose candidate
/// sources feed the Pearson coefficient.
std::vector<DprRow> analyze_dpr(const std::vector<ResultRow>& rows,
                                const std::map<std::string, DatasetSummary>& summaries,
                                Method correlation_method = Method::IfsOur);

struct BoxSummary {
  std::string group;
  std::size_t n = 0;
  /// Whisker ends: extremes of the values inside the 1.5 IQR fences.
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::vector<double> outliers;
};

BoxSummary box_summary(const std::string& group, std::vector<double> values);
std::vector<BoxSummary> emit_boxplot_summary(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups);

struct CoefficientRow {
  std::string target;
  std::string source;
  std::string indicator;
  double magnitude = 0.0;
};

struct ReportBundle {
  std::vector<ResultRow> results;
  std::vector<BestEntry> best;
  std::vector<MethodComparison> comparisons;
  std::vector<DprRow> dpr;
  std::vector<BoxSummary> boxplots;
  std::vector<CoefficientRow> coefficients;
  std::map<std::string, nlohmann::json> models;  // file stem -> model
  nlohmann::json manifest;

  std::size_t failures() const;
};

/// Executes every enumerated pair, then mix runs over the best sources.
ReportBundle run_plan(const ExperimentConfig& config);
ReportBundle run_plan(const ExperimentConfig& config, const std::vector<Project>& projects);

/// Writes the bundle's CSV tables, models and manifest under `dir`.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);

std::string results_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);
std::string best_csv(const std::vector<BestEntry>& best);
std::string comparisons_csv(const std::vector<MethodComparison>& comparisons);
std::string dpr_csv(const std::vector<DprRow>& rows);
std::string boxplot_csv(const std::vector<BoxSummary>& boxes);

/// Hex SHA-256 of `content`.
std::string sha256_hex(const std::string& content);

}  // namespace cpdp
