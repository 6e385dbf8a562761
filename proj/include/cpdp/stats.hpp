#pragma once

#include "cpdp/corpus.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cpdp {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Tallies predictions against ground truth (1 = defective).
ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

/// Precision, recall and their harmonic mean; every 0/0 evaluates to 0.
Prf prf(const ConfusionMatrix& confusion);

/// Defect-proportion ratio: source defect ratio over target defect ratio.
/// Throws DataError("DPR undefined") when the target has no defects.
double dpr(const DatasetSummary& source, const DatasetSummary& target);

/// (#{x_i > y_j} - #{x_i < y_j}) / (|x| |y|).
double cliffs_delta(std::span<const double> x, std::span<const double> y);

enum class WilcoxonMethod { Auto, Exact, Asymptotic };

struct ComparisonResult {
  double p_value = 1.0;
  /// min(W+, W-) over the non-zero differences.
  double statistic = 0.0;
  double cliffs_delta = 0.0;
  std::size_t n_pairs = 0;
  std::string method_note;
};

/// Largest effective sample size (after dropping zero differences) for which
/// Auto selects exact enumeration.
inline constexpr std::size_t kWilcoxonExactCutoff = 12;

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped and tied magnitudes receive midranks.
/// Magnitudes within 1e-9 relative of each other count as tied, so values
/// printed to two decimals compare the way they read. The exact branch
/// reports P(min(W+, W-) <= observed) over all 2^n sign assignments; the
/// asymptotic branch uses the tie-corrected normal approximation without
/// continuity correction. `cliffs_delta` in the result is d(x, y).
ComparisonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                      WilcoxonMethod method = WilcoxonMethod::Auto);

/// Brute-force reference for the exact branch: visits all 2^n sign
/// assignments over the realized midranks. Requires n <= 15.
double wilcoxon_exact_oracle(std::span<const double> x, std::span<const double> y);

struct PearsonResult {
  double r = 0.0;
  double p_value = 1.0;
};

/// Sample Pearson correlation with a two-sided t-test on n-2 degrees of freedom.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// Type-7 quantile of ascending `sorted`: linear interpolation at p(n-1).
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace cpdp
