#include "cpdp/predictors.hpp"

#include "cpdp/error.hpp"
#include "cpdp/profile.hpp"

namespace cpdp {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::CpdpPure: return "cpdp_pure";
    case Method::IfsOur: return "ifs_our";
    case Method::IfsMin: return "ifs_min";
    case Method::Mix: return "mix";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (auto m : {Method::CpdpPure, Method::IfsOur, Method::IfsMin, Method::Mix}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

namespace {

void require_distinct(const Project& source, const Project& target) {
  if (source.name() == target.name()) {
    throw DataError("source and target must be different projects ('" + source.name() + "')");
  }
}

void fill_metrics(PredictionOutcome& out, const Labels& actual) {
  out.confusion = confusion(actual, out.predicted);
  const auto scores = prf(out.confusion);
  out.precision = scores.precision;
  out.recall = scores.recall;
  out.f_measure = scores.f_measure;
}

// Trains on the source matrix and scores the target; both already live in
// the same feature space with matching column order. Target labels are only
// read after prediction, for scoring.
PredictionOutcome fit_and_score(const Matrix& source_x, const Labels& source_y,
                                const std::vector<std::string>& names, const Matrix& target_x,
                                const Labels& target_y, const EngineParams& params) {
  PredictionOutcome out;
  Model model = train(source_x, source_y, params.learner, names);
  const Eigen::VectorXd p = predict_proba(model, target_x);
  out.probabilities = std::vector<double>(p.data(), p.data() + p.size());
  out.predicted = classify(model, target_x);
  out.model = std::move(model);
  fill_metrics(out, target_y);
  return out;
}

PredictionOutcome run_same_space(const Project& source, const Project& target,
                                 const EngineParams& params) {
  const Matrix sx = preprocess(source.matrix(), params.preprocessing);
  const Matrix tx = preprocess(target.matrix(), params.preprocessing);
  return fit_and_score(sx, source.labels(), source.schema().feature_names(), tx, target.labels(),
                       params);
}

}  // namespace

PredictionOutcome run_cpdp_pure(const Project& source, const Project& target,
                                const EngineParams& params) {
  require_distinct(source, target);
  const auto& src_names = source.schema().canonical_names();
  const auto& tgt_names = target.schema().canonical_names();
  if (src_names.size() != tgt_names.size()) {
    throw DataError("feature sets differ; use an IFS method");
  }
  std::vector<std::size_t> order;
  for (const auto& name : src_names) {
    auto j = target.schema().find(name);
    if (j < 0) throw DataError("feature sets differ; use an IFS method");
    order.push_back(static_cast<std::size_t>(j));
  }
  bool identity = true;
  for (std::size_t i = 0; i < order.size(); ++i) identity = identity && order[i] == i;

  auto out = identity ? run_same_space(source, target, params)
                      : run_same_space(source, target.select_columns(order), params);
  out.source_name = source.name();
  out.target_name = target.name();
  out.method = Method::CpdpPure;
  return out;
}

PredictionOutcome run_ifs_our(const Project& source, const Project& target,
                              const EngineParams& params) {
  require_distinct(source, target);
  const auto sp = characterize_project(source, params.preprocessing);
  const auto tp = characterize_project(target, params.preprocessing);
  std::vector<std::string> names(indicator_names().begin(), indicator_names().end());
  auto out = fit_and_score(sp.matrix, sp.labels, names, tp.matrix, target.labels(), params);
  out.source_name = source.name();
  out.target_name = target.name();
  out.method = Method::IfsOur;
  return out;
}

PredictionOutcome run_ifs_min(const Project& source, const Project& target,
                              const EngineParams& params) {
  require_distinct(source, target);
  const auto [s, t] = intersect_features(source, target);
  auto out = run_same_space(s, t, params);
  out.source_name = source.name();
  out.target_name = target.name();
  out.method = Method::IfsMin;
  return out;
}

Labels fuse_or(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) throw DataError("cannot fuse predictions of different lengths");
  Labels out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] == 1 || b[i] == 1) ? 1 : 0;
  return out;
}

PredictionOutcome run_mix(const Project& source_same, const Project& source_diff,
                          const Project& target, const EngineParams& params) {
  const auto pure = run_cpdp_pure(source_same, target, params);
  const auto ifs = run_ifs_our(source_diff, target, params);

  PredictionOutcome out;
  out.source_name = source_same.name();
  out.second_source_name = source_diff.name();
  out.target_name = target.name();
  out.method = Method::Mix;
  out.predicted = fuse_or(pure.predicted, ifs.predicted);
  fill_metrics(out, target.labels());
  return out;
}

PairPlan enumerate_pairs(const std::vector<Project>& projects, Method method) {
  PairPlan plan;
  if (method == Method::Mix) {
    plan = enumerate_pairs(projects, Method::CpdpPure);
    auto ifs = enumerate_pairs(projects, Method::IfsOur);
    plan.insert(plan.end(), ifs.begin(), ifs.end());
    return plan;
  }
  const bool within = method == Method::CpdpPure;
  // Target-major order, matching how result tables are read.
  for (std::size_t t = 0; t < projects.size(); ++t) {
    for (std::size_t s = 0; s < projects.size(); ++s) {
      if (s == t) continue;
      const bool same_family = projects[s].dataset_family() == projects[t].dataset_family();
      if (same_family != within) continue;
      if (method == Method::IfsMin) {
        bool common = false;
        for (const auto& name : projects[s].schema().canonical_names()) {
          common = common || projects[t].schema().find(name) >= 0;
        }
        if (!common) continue;
      }
      plan.push_back({s, t, method});
    }
  }
  return plan;
}

}  // namespace cpdp
