#include "cpdp/error.hpp"
#include "cpdp/harness.hpp"
#include "cpdp/text.hpp"

#include <fstream>
#include <set>

namespace cpdp {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("invalid value for '" + std::string(key) + "' in " + where);
  }
}

std::map<std::string, std::string> alias_map(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'aliases' must be an object in " + where);
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw ConfigError("alias for '" + k + "' must be a string in " + where);
    out[k] = v.get<std::string>();
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j,
                 {"datasets", "aliases", "preprocessing", "learner", "methods", "output_dir",
                  "workers", "mix_repeats", "seed"},
                 "configuration");

  ExperimentConfig cfg;
  cfg.canonical_json = j.dump();

  const auto global_aliases =
      j.contains("aliases") ? alias_map(j.at("aliases"), "configuration") : std::map<std::string, std::string>{};

  if (!j.contains("datasets") || !j.at("datasets").is_array() || j.at("datasets").empty()) {
    throw ConfigError("'datasets' must be a non-empty array");
  }
  std::set<std::string> names;
  for (const auto& d : j.at("datasets")) {
    if (!d.is_object()) throw ConfigError("dataset entries must be objects");
    DatasetEntry e;
    e.name = get_or<std::string>(d, "name", "", "dataset entry");
    const std::string where = "dataset '" + e.name + "'";
    reject_unknown(d, {"name", "family", "path", "format", "label_column", "ignored_columns", "aliases"},
                   where);
    if (e.name.empty()) throw ConfigError("dataset entry without a name");
    if (!names.insert(e.name).second) throw ConfigError("duplicate dataset name '" + e.name + "'");
    e.family = get_or<std::string>(d, "family", "", where);
    if (e.family.empty()) throw ConfigError(where + " has no family");
    const auto path = get_or<std::string>(d, "path", "", where);
    if (path.empty()) throw ConfigError(where + " has no path");
    e.path = std::filesystem::path(path);
    if (e.path.is_relative() && !base_dir.empty()) e.path = base_dir / e.path;
    e.format = text::lower(get_or<std::string>(d, "format", "", where));
    if (e.format.empty()) {
      const auto ext = text::lower(e.path.extension().string());
      e.format = ext == ".arff" ? "arff" : "csv";
    }
    if (e.format != "csv" && e.format != "arff") throw ConfigError(where + ": unknown format");
    e.schema.label_column = get_or<std::string>(d, "label_column", "", where);
    e.schema.ignored_columns = get_or<std::vector<std::string>>(d, "ignored_columns", {}, where);
    e.schema.alias_map = global_aliases;
    if (d.contains("aliases")) {
      for (auto& [k, v] : alias_map(d.at("aliases"), where)) e.schema.alias_map[k] = v;
    }
    cfg.datasets.push_back(std::move(e));
  }

  if (j.contains("preprocessing")) {
    const auto& p = j.at("preprocessing");
    reject_unknown(p, {"log_filter", "zscore"}, "preprocessing");
    cfg.engine.preprocessing.log_filter = get_or<bool>(p, "log_filter", false, "preprocessing");
    cfg.engine.preprocessing.zscore = get_or<bool>(p, "zscore", true, "preprocessing");
  }
  if (j.contains("learner")) {
    const auto& l = j.at("learner");
    reject_unknown(l, {"ridge", "max_iterations", "tolerance", "decision_threshold"}, "learner");
    auto& lp = cfg.engine.learner;
    lp.ridge = get_or<double>(l, "ridge", lp.ridge, "learner");
    lp.max_iterations = get_or<int>(l, "max_iterations", lp.max_iterations, "learner");
    lp.tolerance = get_or<double>(l, "tolerance", lp.tolerance, "learner");
    lp.decision_threshold = get_or<double>(l, "decision_threshold", lp.decision_threshold, "learner");
  }
  cfg.engine.learner.validate();

  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& name : get_or<std::vector<std::string>>(j, "methods", {}, "configuration")) {
      cfg.methods.push_back(method_from_string(name));
    }
    if (cfg.methods.empty()) throw ConfigError("'methods' must not be empty");
  }
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir.string(), "configuration");
  if (cfg.output_dir.is_relative() && !base_dir.empty()) cfg.output_dir = base_dir / cfg.output_dir;
  const auto workers = get_or<long long>(j, "workers", 1, "configuration");
  if (workers < 1) throw ConfigError("'workers' must be at least 1");
  cfg.workers = static_cast<std::size_t>(workers);
  cfg.mix_repeats = get_or<int>(j, "mix_repeats", 1, "configuration");
  if (cfg.mix_repeats < 1) throw ConfigError("'mix_repeats' must be at least 1");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const json& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  j.merge_patch(overrides);
  return parse_config(j, path.parent_path());
}

std::vector<Project> load_datasets(const ExperimentConfig& config) {
  std::vector<Project> projects;
  for (const auto& d : config.datasets) {
    try {
      projects.push_back(d.format == "arff" ? load_arff(d.path, d.schema, d.name, d.family)
                                            : load_csv(d.path, d.schema, d.name, d.family));
    } catch (const DataError& e) {
      throw DataError("dataset '" + d.name + "': " + e.what());
    }
  }
  return projects;
}

}  // namespace cpdp
