#include "cpdp/profile.hpp"

#include "cpdp/error.hpp"
#include "cpdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace cpdp {

const std::array<std::string_view, kIndicatorCount>& indicator_names() {
  static constexpr std::array<std::string_view, kIndicatorCount> names{
      "min",      "max",           "range",         "sum",
      "mean",     "median",        "mode",          "first_quartile",
      "third_quartile", "interquartile_range", "variance", "standard_deviation",
      "mean_absolute_deviation", "skewness", "kurtosis", "variation_ratio"};
  return names;
}

namespace {

struct ModeResult {
  double value;
  std::size_t count;
};

// `sorted` ascending. Groups by value rounded to 4 decimals; groups are
// contiguous in sorted order because rounding is monotone.
ModeResult rounded_mode(const std::vector<double>& sorted) {
  ModeResult best{sorted.front(), 0};
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double key = std::round(sorted[i] * 1e4);
    std::size_t j = i;
    while (j < sorted.size() && std::round(sorted[j] * 1e4) == key) ++j;
    if (j - i > best.count) best = {sorted[i], j - i};
    i = j;
  }
  return best;
}

}  // namespace

CharacteristicVector characterize_instance(std::span<const double> values) {
  if (values.empty()) throw DataError("empty instance");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  // Sums run over the sorted copy so the result is independent of input order.
  const double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  const double mean = sum / n;
  double ss = 0.0;
  double abs_dev = 0.0;
  for (double x : sorted) {
    ss += (x - mean) * (x - mean);
    abs_dev += std::abs(x - mean);
  }
  const double variance = sorted.size() > 1 ? ss / (n - 1.0) : 0.0;
  const double sd_pop = std::sqrt(ss / n);

  double skewness = 0.0;
  double kurtosis = 0.0;
  if (sd_pop >= 1e-12) {
    double m3 = 0.0;
    double m4 = 0.0;
    for (double x : sorted) {
      const double z = (x - mean) / sd_pop;
      m3 += z * z * z;
      m4 += z * z * z * z;
    }
    skewness = m3 / n;
    kurtosis = m4 / n - 3.0;
  }

  const double q1 = quantile_sorted(sorted, 0.25);
  const double q3 = quantile_sorted(sorted, 0.75);
  const auto mode = rounded_mode(sorted);

  CharacteristicVector v;
  v.values = {sorted.front(),
              sorted.back(),
              sorted.back() - sorted.front(),
              sum,
              mean,
              quantile_sorted(sorted, 0.5),
              mode.value,
              q1,
              q3,
              q3 - q1,
              variance,
              std::sqrt(variance),
              abs_dev / n,
              skewness,
              kurtosis,
              1.0 - static_cast<double>(mode.count) / n};
  return v;
}

Project ProfiledProject::as_project() const {
  std::vector<std::string> names(indicator_names().begin(), indicator_names().end());
  return Project(source_name, dataset_family, FeatureSchema(std::move(names), "label"), matrix,
                 labels);
}

ProfiledProject characterize_project(const Project& project, const PreprocessConfig& config) {
  const Matrix prepared = preprocess(project.matrix(), config);
  // Row-major copy so each instance is a contiguous span.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = prepared;

  ProfiledProject out;
  out.source_name = project.name();
  out.dataset_family = project.dataset_family();
  out.source_feature_count = project.feature_count();
  out.labels = project.labels();
  out.matrix.resize(rows.rows(), static_cast<Eigen::Index>(kIndicatorCount));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const auto v = characterize_instance(
        std::span<const double>(rows.row(i).data(), static_cast<std::size_t>(rows.cols())));
    for (std::size_t k = 0; k < kIndicatorCount; ++k) {
      out.matrix(i, static_cast<Eigen::Index>(k)) = v.values[k];
    }
  }
  return out;
}

}  // namespace cpdp
