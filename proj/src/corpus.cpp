#include "cpdp/corpus.hpp"

#include "cpdp/error.hpp"
#include "cpdp/text.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cpdp {

std::string canonical_feature_name(const std::string& name,
                                   const std::map<std::string, std::string>& alias_map) {
  const std::string key = text::lower(text::trim(name));
  for (const auto& [local, canonical] : alias_map) {
    if (text::lower(local) == key) return text::lower(text::trim(canonical));
  }
  return key;
}

FeatureSchema::FeatureSchema(std::vector<std::string> feature_names, std::string label_column,
                             const std::map<std::string, std::string>& alias_map)
    : feature_names_(std::move(feature_names)), label_column_(std::move(label_column)) {
  std::set<std::string> seen;
  const std::string label_key = text::lower(text::trim(label_column_));
  canonical_names_.reserve(feature_names_.size());
  for (const auto& name : feature_names_) {
    auto canonical = canonical_feature_name(name, alias_map);
    if (!label_key.empty() && text::lower(text::trim(name)) == label_key) {
      throw DataError("label column '" + label_column_ + "' listed as a feature");
    }
    if (!seen.insert(canonical).second) {
      throw DataError("duplicate feature names: '" + canonical + "'");
    }
    canonical_names_.push_back(std::move(canonical));
  }
}

std::ptrdiff_t FeatureSchema::find(const std::string& canonical) const {
  auto it = std::find(canonical_names_.begin(), canonical_names_.end(), canonical);
  return it == canonical_names_.end() ? -1 : it - canonical_names_.begin();
}

FeatureSchema FeatureSchema::select(const std::vector<std::size_t>& columns) const {
  FeatureSchema out;
  out.label_column_ = label_column_;
  for (auto c : columns) {
    out.feature_names_.push_back(feature_names_.at(c));
    out.canonical_names_.push_back(canonical_names_.at(c));
  }
  return out;
}

Project::Project(std::string name, std::string dataset_family, FeatureSchema schema,
                 Matrix matrix, Labels labels)
    : name_(std::move(name)),
      family_(std::move(dataset_family)),
      schema_(std::move(schema)),
      matrix_(std::move(matrix)),
      labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("project '" + name_ + "' has no instances");
  if (schema_.size() == 0) throw DataError("project '" + name_ + "' has no features");
  if (static_cast<std::size_t>(matrix_.rows()) != labels_.size()) {
    throw DataError("project '" + name_ + "': matrix rows do not match label count");
  }
  if (static_cast<std::size_t>(matrix_.cols()) != schema_.size()) {
    throw DataError("project '" + name_ + "': matrix columns do not match schema");
  }
  if (!matrix_.allFinite()) throw DataError("project '" + name_ + "' contains non-finite values");
  for (int y : labels_) {
    if (y != 0 && y != 1) throw DataError("project '" + name_ + "': labels must be 0 or 1");
  }
}

Project Project::select_columns(const std::vector<std::size_t>& columns) const {
  Matrix sub(matrix_.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    sub.col(static_cast<Eigen::Index>(j)) = matrix_.col(static_cast<Eigen::Index>(columns[j]));
  }
  return Project(name_, family_, schema_.select(columns), std::move(sub), labels_);
}

Project Project::renamed(std::string name, std::string dataset_family) const {
  return Project(std::move(name), std::move(dataset_family), schema_, matrix_, labels_);
}

int binarize_label(const std::string& cell) {
  const std::string v = text::lower(text::trim(cell));
  if (v.empty()) throw DataError("empty label cell");
  if (auto number = text::parse_double(v)) {
    if (!std::isfinite(*number) || *number < 0) {
      throw DataError("invalid defect count '" + cell + "'");
    }
    return *number > 0 ? 1 : 0;
  }
  static const std::set<std::string> positive{"true", "yes", "y", "t", "buggy", "defective"};
  static const std::set<std::string> negative{"false", "no", "n", "f", "clean", "non-defective"};
  if (positive.contains(v)) return 1;
  if (negative.contains(v)) return 0;
  throw DataError("unrecognized label value '" + cell + "'");
}

DatasetSummary summarize(const Project& project) {
  DatasetSummary s;
  s.instance_count = project.instance_count();
  s.defect_count = static_cast<std::size_t>(
      std::count(project.labels().begin(), project.labels().end(), 1));
  s.defect_ratio = static_cast<double>(s.defect_count) / static_cast<double>(s.instance_count);
  s.metric_count = project.feature_count();
  return s;
}

std::pair<Project, Project> intersect_features(const Project& a, const Project& b) {
  std::vector<std::size_t> cols_a;
  std::vector<std::size_t> cols_b;
  const auto& names = a.schema().canonical_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto j = b.schema().find(names[i]);
    if (j >= 0) {
      cols_a.push_back(i);
      cols_b.push_back(static_cast<std::size_t>(j));
    }
  }
  if (cols_a.empty()) {
    throw DataError("no common metrics between '" + a.name() + "' and '" + b.name() + "'");
  }
  return {a.select_columns(cols_a), b.select_columns(cols_b)};
}

}  // namespace cpdp
