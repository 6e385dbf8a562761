#include "cpdp/learner.hpp"

#include "cpdp/error.hpp"

#include <algorithm>
#include <cmath>

namespace cpdp {

void LearnerParams::validate() const {
  if (!(ridge >= 0.0)) throw ConfigError("ridge must be non-negative");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw ConfigError("decision_threshold must lie in (0, 1)");
  }
}

namespace {

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + exp(s)) without overflow.
double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

void check_shapes(const Matrix& x, std::span<const int> y, const Eigen::VectorXd& weights) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw DataError("row count does not match label count");
  }
  if (x.cols() != weights.size()) throw DataError("feature count does not match weight count");
}

}  // namespace

double penalized_log_likelihood(const Matrix& x, std::span<const int> y, double intercept,
                                const Eigen::VectorXd& weights, double ridge) {
  check_shapes(x, y, weights);
  const Eigen::VectorXd scores = (x * weights).array() + intercept;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    // y log p + (1-y) log(1-p) = y s - log(1 + e^s)
    ll += (y[static_cast<std::size_t>(i)] == 1 ? scores(i) : 0.0) - softplus(scores(i));
  }
  return ll - ridge * weights.squaredNorm();
}

Eigen::VectorXd penalized_gradient(const Matrix& x, std::span<const int> y, double intercept,
                                   const Eigen::VectorXd& weights, double ridge) {
  check_shapes(x, y, weights);
  Eigen::VectorXd residual(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    residual(i) = y[static_cast<std::size_t>(i)] - sigmoid(intercept + x.row(i).dot(weights));
  }
  Eigen::VectorXd g(x.cols() + 1);
  g(0) = residual.sum();
  g.tail(x.cols()) = x.transpose() * residual - 2.0 * ridge * weights;
  return g;
}

Model train(const Matrix& x, std::span<const int> y, const LearnerParams& params,
            std::vector<std::string> feature_names) {
  params.validate();
  const Eigen::Index m = x.rows();
  const Eigen::Index k = x.cols();
  if (static_cast<std::size_t>(m) != y.size()) throw DataError("row count does not match label count");
  if (!feature_names.empty() && feature_names.size() != static_cast<std::size_t>(k)) {
    throw DataError("feature name count does not match column count");
  }
  const auto positives = std::count(y.begin(), y.end(), 1);
  if (m < 2 || positives == 0 || positives == m) {
    throw DataError("degenerate training set: both classes are required");
  }
  if (feature_names.empty()) {
    for (Eigen::Index j = 0; j < k; ++j) feature_names.push_back("x" + std::to_string(j));
  }

  // Design matrix with a leading intercept column.
  Matrix design(m, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = x;
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(k + 1, 2.0 * params.ridge);
  penalty(0) = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k + 1);
  auto objective = [&](const Eigen::VectorXd& b) {
    return penalized_log_likelihood(x, y, b(0), b.tail(k), params.ridge);
  };
  double current = objective(beta);

  Model model;
  model.params = params;
  model.feature_names = std::move(feature_names);
  model.meta.objective_history.push_back(current);

  for (int iter = 1; iter <= params.max_iterations; ++iter) {
    model.meta.iterations = iter;
    const Eigen::VectorXd scores = design * beta;
    Eigen::VectorXd p(m);
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      p(i) = sigmoid(scores(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    Eigen::VectorXd residual(m);
    for (Eigen::Index i = 0; i < m; ++i) residual(i) = y[static_cast<std::size_t>(i)] - p(i);

    Eigen::VectorXd gradient = design.transpose() * residual;
    gradient -= penalty.cwiseProduct(beta);
    Matrix hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal() += penalty;

    Eigen::VectorXd step = hessian.ldlt().solve(gradient);
    if (!step.allFinite()) step = hessian.completeOrthogonalDecomposition().solve(gradient);
    if (!step.allFinite()) break;

    // Step halving keeps the objective monotone.
    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    double next = objective(candidate);
    while (!(next >= current) && scale > 1e-10) {
      scale *= 0.5;
      candidate = beta + scale * step;
      next = objective(candidate);
    }
    if (!(next >= current)) break;

    const double change = next - current;
    beta = std::move(candidate);
    current = next;
    model.meta.objective_history.push_back(current);
    const double grad_norm =
        penalized_gradient(x, y, beta(0), beta.tail(k), params.ridge).norm();
    if (change < params.tolerance && grad_norm < 1e-6) {
      model.meta.converged = true;
      break;
    }
  }

  model.intercept = beta(0);
  model.weights = beta.tail(k);
  model.meta.log_likelihood = current;
  model.meta.gradient_norm = penalized_gradient(x, y, model.intercept, model.weights, params.ridge).norm();
  if (!model.meta.converged && model.meta.gradient_norm < 1e-6) model.meta.converged = true;
  return model;
}

Model train(const Project& project, const LearnerParams& params) {
  return train(project.matrix(), project.labels(), params, project.schema().feature_names());
}

double predict_proba(const Model& model, std::span<const double> instance) {
  if (instance.size() != static_cast<std::size_t>(model.weights.size())) {
    throw DataError("instance length does not match model feature count");
  }
  double s = model.intercept;
  for (std::size_t j = 0; j < instance.size(); ++j) {
    s += model.weights(static_cast<Eigen::Index>(j)) * instance[j];
  }
  return sigmoid(s);
}

Eigen::VectorXd predict_proba(const Model& model, const Matrix& x) {
  if (x.cols() != model.weights.size()) {
    throw DataError("column count does not match model feature count");
  }
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out(i) = sigmoid(model.intercept + x.row(i).dot(model.weights));
  }
  return out;
}

Labels classify(const Model& model, const Matrix& x, double threshold) {
  const auto p = predict_proba(model, x);
  Labels out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= threshold ? 1 : 0;
  return out;
}

Labels classify(const Model& model, const Matrix& x) {
  return classify(model, x, model.params.decision_threshold);
}

std::vector<std::pair<std::string, double>> coefficient_magnitudes(const Model& model) {
  std::vector<std::pair<std::string, double>> out;
  for (Eigen::Index j = 0; j < model.weights.size(); ++j) {
    const auto idx = static_cast<std::size_t>(j);
    out.emplace_back(idx < model.feature_names.size() ? model.feature_names[idx] : "x" + std::to_string(j),
                     std::abs(model.weights(j)));
  }
  return out;
}

nlohmann::json to_json(const Model& model) {
  nlohmann::json j;
  j["feature_names"] = model.feature_names;
  j["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size());
  j["intercept"] = model.intercept;
  j["params"] = {{"ridge", model.params.ridge},
                 {"max_iterations", model.params.max_iterations},
                 {"tolerance", model.params.tolerance},
                 {"decision_threshold", model.params.decision_threshold}};
  j["training"] = {{"iterations", model.meta.iterations},
                   {"log_likelihood", model.meta.log_likelihood},
                   {"gradient_norm", model.meta.gradient_norm},
                   {"converged", model.meta.converged}};
  return j;
}

Model model_from_json(const nlohmann::json& j) {
  Model m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  const auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  m.intercept = j.at("intercept").get<double>();
  const auto& p = j.at("params");
  m.params.ridge = p.at("ridge").get<double>();
  m.params.max_iterations = p.at("max_iterations").get<int>();
  m.params.tolerance = p.at("tolerance").get<double>();
  m.params.decision_threshold = p.at("decision_threshold").get<double>();
  const auto& t = j.at("training");
  m.meta.iterations = t.at("iterations").get<int>();
  m.meta.log_likelihood = t.at("log_likelihood").get<double>();
  m.meta.gradient_norm = t.at("gradient_norm").get<double>();
  m.meta.converged = t.at("converged").get<bool>();
  if (m.feature_names.size() != w.size()) throw DataError("model: weight/name count mismatch");
  return m;
}

}  // namespace cpdp
