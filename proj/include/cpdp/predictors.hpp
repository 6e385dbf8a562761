#pragma once

#include "cpdp/corpus.hpp"
#include "cpdp/learner.hpp"
#include "cpdp/preprocess.hpp"
#include "cpdp/stats.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cpdp {

enum class Method { CpdpPure, IfsOur, IfsMin, Mix };

std::string_view to_string(Method method);
/// Accepts cpdp_pure, ifs_our, ifs_min, mix. Throws ConfigError otherwise.
Method method_from_string(std::string_view name);

struct EngineParams {
  PreprocessConfig preprocessing;
  LearnerParams learner;
};

struct PredictionOutcome {
  std::string source_name;
  /// Cross-family source of a mix run; empty for single-source methods.
  std::string second_source_name;
  std::string target_name;
  Method method = Method::CpdpPure;
  Labels predicted;
  /// Absent for mix, which fuses labels only.
  std::optional<std::vector<double>> probabilities;
  ConfusionMatrix confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  /// Trained model for single-model methods.
  std::optional<Model> model;
};

/// Regular CPDP: source and target share one canonical metric set. Target
/// columns are aligned to the source order before prediction.
PredictionOutcome run_cpdp_pure(const Project& source, const Project& target,
                                const EngineParams& params);

/// Both projects are mapped to distribution-characteristic space, then
/// handled as regular CPDP.
PredictionOutcome run_ifs_our(const Project& source, const Project& target,
                              const EngineParams& params);

/// Both projects are restricted to their common metrics, then handled as
/// regular CPDP.
PredictionOutcome run_ifs_min(const Project& source, const Project& target,
                              const EngineParams& params);

/// An instance is defective if the same-family CPDP model or the ifs_our
/// model built on `source_diff` flags it.
PredictionOutcome run_mix(const Project& source_same, const Project& source_diff,
                          const Project& target, const EngineParams& params);

/// Element-wise OR of two label vectors.
Labels fuse_or(const Labels& a, const Labels& b);

struct PlannedPair {
  std::size_t source = 0;
  std::size_t target = 0;
  Method method = Method::CpdpPure;

  bool operator==(const PlannedPair&) const = default;
};

using PairPlan = std::vector<PlannedPair>;

/// Ordered source->target pairs for `method`, indices into `projects`.
///
/// cpdp_pure pairs projects within each dataset family. ifs_our pairs every
/// cross-family combination; ifs_min does the same but drops pairs without a
/// common metric. Mix sources are chosen from completed runs, so mix expands
/// to the union of its cpdp_pure and ifs_our candidate plans.
PairPlan enumerate_pairs(const std::vector<Project>& projects, Method method);

}  // namespace cpdp
