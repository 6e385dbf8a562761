#include "cpdp/preprocess.hpp"

#include "cpdp/error.hpp"

#include <cmath>

namespace cpdp {

Matrix log_filter(const Matrix& matrix) {
  if ((matrix.array() < 0.0).any()) {
    throw DataError("log filter undefined for negative values");
  }
  return matrix.array().log1p().matrix();
}

NormalizedMatrix zscore(const Matrix& matrix) {
  const auto m = matrix.rows();
  if (m < 2) throw DataError("insufficient rows for normalization");

  NormalizedMatrix out{Matrix(m, matrix.cols()), {}};
  out.stats.mean.resize(matrix.cols());
  out.stats.sd.resize(matrix.cols());
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const auto col = matrix.col(j);
    const double mean = col.mean();
    const double ss = (col.array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(m - 1));
    out.stats.mean(j) = mean;
    // Rounding noise on a constant column must not be amplified into +-1.
    const bool constant = col.maxCoeff() == col.minCoeff() || sd <= 1e-12 * (std::abs(mean) + 1.0);
    out.stats.sd(j) = constant ? 0.0 : sd;
    if (constant) {
      out.matrix.col(j).setZero();
    } else {
      out.matrix.col(j) = (col.array() - mean) / sd;
    }
  }
  return out;
}

Matrix preprocess(const Matrix& matrix, const PreprocessConfig& config) {
  Matrix out = config.log_filter ? log_filter(matrix) : matrix;
  if (config.zscore) out = zscore(out).matrix;
  return out;
}

}  // namespace cpdp
