#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cpdp {

using Matrix = Eigen::MatrixXd;
using Labels = std::vector<int>;

/// How a dataset's columns are interpreted at load time.
struct SchemaConfig {
  std::string label_column;
  /// Columns skipped entirely (identifiers such as file or version names).
  std::vector<std::string> ignored_columns;
  /// Local metric name -> canonical name; matched case-insensitively.
  std::map<std::string, std::string> alias_map;
};

/// Ordered feature identity of a project.
///
/// `feature_names` keeps the names as they appear in the source file,
/// `canonical_names` the lower-cased, alias-resolved names used for
/// matching metrics across collections.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<std::string> feature_names, std::string label_column,
                const std::map<std::string, std::string>& alias_map = {});

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& canonical_names() const { return canonical_names_; }
  const std::string& label_column() const { return label_column_; }
  std::size_t size() const { return feature_names_.size(); }

  /// Index of a canonical name, or -1.
  std::ptrdiff_t find(const std::string& canonical) const;

  /// Schema with only the given columns, in the given order.
  FeatureSchema select(const std::vector<std::size_t>& columns) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::string> canonical_names_;
  std::string label_column_;
};

/// Lower-cases `name` after resolving it through `alias_map`.
std::string canonical_feature_name(const std::string& name,
                                   const std::map<std::string, std::string>& alias_map);

/// A labelled defect dataset: m instances by n metrics plus binary labels.
/// Immutable once constructed.
class Project {
 public:
  Project(std::string name, std::string dataset_family, FeatureSchema schema, Matrix matrix,
          Labels labels);

  const std::string& name() const { return name_; }
  const std::string& dataset_family() const { return family_; }
  const FeatureSchema& schema() const { return schema_; }
  const Matrix& matrix() const { return matrix_; }
  const Labels& labels() const { return labels_; }
  std::size_t instance_count() const { return labels_.size(); }
  std::size_t feature_count() const { return schema_.size(); }

  /// Same data restricted to (and reordered by) the given columns.
  Project select_columns(const std::vector<std::size_t>& columns) const;
  Project renamed(std::string name, std::string dataset_family) const;

 private:
  std::string name_;
  std::string family_;
  FeatureSchema schema_;
  Matrix matrix_;
  Labels labels_;
};

struct DatasetSummary {
  std::size_t instance_count = 0;
  std::size_t defect_count = 0;
  double defect_ratio = 0.0;
  std::size_t metric_count = 0;
};

/// Maps a raw label cell to {0,1}: numeric defect counts > 0 are defective;
/// textual true/yes/buggy/defective/y/t are defective, false/no/clean/n/f are not.
int binarize_label(const std::string& cell);

Project load_csv(const std::filesystem::path& path, const SchemaConfig& config,
                 const std::string& name, const std::string& dataset_family);
Project load_arff(const std::filesystem::path& path, const SchemaConfig& config,
                  const std::string& name, const std::string& dataset_family);

DatasetSummary summarize(const Project& project);

/// Restricts both projects to their common canonical metrics, in the
/// column order of `a`. Throws DataError("no common metrics") when disjoint.
std::pair<Project, Project> intersect_features(const Project& a, const Project& b);

}  // namespace cpdp
