#pragma once

#include "cpdp/corpus.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cpdp {

struct LearnerParams {
  /// L2 penalty on the weights (the intercept is not penalized).
  double ridge = 1e-8;
  int max_iterations = 200;
  /// Convergence threshold on the change of the penalized log-likelihood.
  double tolerance = 1e-8;
  double decision_threshold = 0.5;

  void validate() const;
};

struct TrainingMeta {
  int iterations = 0;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  /// Penalized log-likelihood after each accepted step, starting at the origin.
  std::vector<double> objective_history;
};

/// Binary logistic-regression model: P(y=1 | x) = sigmoid(intercept + w.x).
struct Model {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  std::vector<std::string> feature_names;
  LearnerParams params;
  TrainingMeta meta;
};

/// Penalized objective maximized by `train`:
///   sum_i [y_i log p_i + (1 - y_i) log(1 - p_i)] - ridge * ||w||^2
double penalized_log_likelihood(const Matrix& x, std::span<const int> y, double intercept,
                                const Eigen::VectorXd& weights, double ridge);

/// Gradient of `penalized_log_likelihood`; element 0 is the intercept.
Eigen::VectorXd penalized_gradient(const Matrix& x, std::span<const int> y, double intercept,
                                   const Eigen::VectorXd& weights, double ridge);

/// Fits the model by Newton-Raphson (IRLS) from all-zero coefficients, halving
/// any step that would lower the objective. Throws DataError("degenerate
/// training set") when fewer than two rows or only one class is present.
Model train(const Matrix& x, std::span<const int> y, const LearnerParams& params,
            std::vector<std::string> feature_names = {});
Model train(const Project& project, const LearnerParams& params);

double predict_proba(const Model& model, std::span<const double> instance);
Eigen::VectorXd predict_proba(const Model& model, const Matrix& x);

/// 1 iff predicted probability >= threshold.
Labels classify(const Model& model, const Matrix& x, double threshold);
Labels classify(const Model& model, const Matrix& x);

/// |w| per feature, in the model's feature order.
std::vector<std::pair<std::string, double>> coefficient_magnitudes(const Model& model);

nlohmann::json to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

}  // namespace cpdp
