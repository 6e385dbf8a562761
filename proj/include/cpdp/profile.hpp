#pragma once

#include "cpdp/corpus.hpp"
#include "cpdp/preprocess.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace cpdp {

inline constexpr std::size_t kIndicatorCount = 16;

enum class Indicator : std::size_t {
  Min,
  Max,
  Range,
  Sum,
  Mean,
  Median,
  Mode,
  FirstQuartile,
  ThirdQuartile,
  InterquartileRange,
  Variance,
  StandardDeviation,
  MeanAbsoluteDeviation,
  Skewness,
  Kurtosis,
  VariationRatio,
};

/// Stable, ordered indicator names used in reports and coefficient tables.
const std::array<std::string_view, kIndicatorCount>& indicator_names();

/// Distribution profile of one instance's feature values.
struct CharacteristicVector {
  std::array<double, kIndicatorCount> values{};

  double operator[](Indicator i) const { return values[static_cast<std::size_t>(i)]; }
  bool operator==(const CharacteristicVector&) const = default;
};

/// Computes the 16 indicators over `values`.
///
/// Variance and standard deviation use n-1 (0 for a single value); quartiles
/// interpolate linearly between order statistics (type 7). The mode is taken
/// over values rounded to 4 decimals, ties going to the smallest, and is
/// reported as the smallest original value in the modal group. Skewness and
/// excess kurtosis use the population sd and are 0 when it is below 1e-12.
///
/// Throws DataError("empty instance") when `values` is empty.
CharacteristicVector characterize_instance(std::span<const double> values);

/// A project mapped into indicator space; one row per source instance.
struct ProfiledProject {
  std::string source_name;
  std::string dataset_family;
  std::size_t source_feature_count = 0;
  Matrix matrix;  // m x kIndicatorCount
  Labels labels;

  /// The profile as a regular Project whose features are the indicators.
  Project as_project() const;
};

/// Preprocesses `project` (per `config`) and characterizes every instance.
ProfiledProject characterize_project(const Project& project, const PreprocessConfig& config);

}  // namespace cpdp
