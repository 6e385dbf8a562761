#pragma once

#include "cpdp/corpus.hpp"

#include <Eigen/Dense>

namespace cpdp {

struct NormalizationStats {
  Eigen::VectorXd mean;
  /// Sample (n-1) standard deviation; 0 marks a constant column.
  Eigen::VectorXd sd;
};

struct NormalizedMatrix {
  Matrix matrix;
  NormalizationStats stats;
};

/// Per-project preprocessing switches. Each project is normalized with its
/// own statistics; nothing is shared between source and target.
struct PreprocessConfig {
  bool log_filter = false;
  bool zscore = true;
};

/// ln(x + 1) per cell. Throws DataError for negative cells.
Matrix log_filter(const Matrix& matrix);

/// Column-wise z-score with sample standard deviation. Constant columns map
/// to all zeros. Throws DataError when fewer than two rows are given.
NormalizedMatrix zscore(const Matrix& matrix);

/// Applies the configured steps in order: log filter, then z-score.
Matrix preprocess(const Matrix& matrix, const PreprocessConfig& config);

}  // namespace cpdp
