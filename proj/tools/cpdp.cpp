// Command-line harness for cross-project defect prediction experiments.
#include "cpdp/csv.hpp"
#include "cpdp/error.hpp"
#include "cpdp/harness.hpp"
#include "cpdp/text.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kPartialFailure = 3 };

nlohmann::json overrides(const std::string& out, std::size_t workers, bool log_filter) {
  auto j = nlohmann::json::object();
  if (!out.empty()) j["output_dir"] = std::filesystem::absolute(out).string();
  if (workers > 0) j["workers"] = workers;
  if (log_filter) j["preprocessing"]["log_filter"] = true;
  return j;
}

int cmd_ingest(const std::string& config_path) {
  const auto config = cpdp::load_config(config_path);
  const auto projects = cpdp::load_datasets(config);
  fmt::print("{:<16} {:<10} {:>10} {:>16} {:>8}\n", "project", "family", "instances", "defects(%)", "metrics");
  for (const auto& p : projects) {
    const auto s = cpdp::summarize(p);
    fmt::print("{:<16} {:<10} {:>10} {:>16} {:>8}\n", p.name(), p.dataset_family(), s.instance_count,
               fmt::format("{} ({:.1f})", s.defect_count, 100.0 * s.defect_ratio), s.metric_count);
  }
  return kOk;
}

int cmd_run(const std::string& config_path, const nlohmann::json& extra) {
  const auto config = cpdp::load_config(config_path, extra);
  const auto bundle = cpdp::run_plan(config);
  cpdp::write_bundle(bundle, config.output_dir);
  fmt::print("executed {} runs ({} failed); report written to {}\n", bundle.results.size(), bundle.failures(),
             config.output_dir.string());
  for (const auto& c : bundle.comparisons) {
    if (c.result) {
      fmt::print("{} vs {}: n={} p={:.4f} d={:.3f} ({})\n", cpdp::to_string(c.a), cpdp::to_string(c.b),
                 c.targets.size(), c.result->p_value, c.result->cliffs_delta, c.note);
    } else {
      fmt::print("{} vs {}: {}\n", cpdp::to_string(c.a), cpdp::to_string(c.b), c.note);
    }
  }
  for (const auto& r : bundle.results) {
    if (!r.ok) std::cerr << "failed " << cpdp::to_string(r.method) << " " << r.source << " -> " << r.target << ": " << r.error << "\n";
  }
  return bundle.failures() > 0 ? kPartialFailure : kOk;
}

std::vector<double> numeric_column(const std::vector<cpdp::csv::Record>& records, std::size_t col) {
  std::vector<double> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (col >= f.size() || cpdp::text::trim(f[col]).empty()) continue;
    auto v = cpdp::text::parse_double(cpdp::text::trim(f[col]));
    if (!v) throw cpdp::DataError("non-numeric cell '" + f[col] + "' at line " + std::to_string(records[i].line));
    out.push_back(*v);
  }
  return out;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw cpdp::ConfigError("column '" + name + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

int cmd_compare(const std::string& path, const std::string& x_name, const std::string& y_name,
                const std::string& method_name) {
  const auto records = cpdp::csv::read_file(path);
  if (records.empty()) throw cpdp::DataError("empty file");
  const auto& header = records.front().fields;

  std::vector<double> x;
  std::vector<double> y;
  const bool long_format = std::find(header.begin(), header.end(), "method") != header.end() &&
                           std::find(header.begin(), header.end(), "f_measure") != header.end();
  if (long_format) {
    // best_per_target.csv (or results.csv): pair the two methods by target.
    std::vector<cpdp::BestEntry> best;
    if (std::find(header.begin(), header.end(), "status") != header.end()) {
      best = cpdp::best_per_target(cpdp::read_results_csv(path));
    } else {
      const auto ct = column_index(header, "target"), cm = column_index(header, "method"),
                 cf = column_index(header, "f_measure");
      for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i].fields;
        cpdp::BestEntry e;
        e.target = f.at(ct);
        e.method = cpdp::method_from_string(f.at(cm));
        e.f_measure = cpdp::text::parse_double(f.at(cf)).value_or(0.0);
        best.push_back(e);
      }
    }
    const auto a = cpdp::method_from_string(x_name);
    const auto b = cpdp::method_from_string(y_name);
    for (const auto& ea : best) {
      for (const auto& eb : best) {
        if (ea.method == a && eb.method == b && ea.target == eb.target) {
          x.push_back(ea.f_measure);
          y.push_back(eb.f_measure);
        }
      }
    }
  } else {
    x = numeric_column(records, column_index(header, x_name));
    y = numeric_column(records, column_index(header, y_name));
  }

  cpdp::WilcoxonMethod method = cpdp::WilcoxonMethod::Auto;
  if (method_name == "exact") method = cpdp::WilcoxonMethod::Exact;
  if (method_name == "asymptotic") method = cpdp::WilcoxonMethod::Asymptotic;
  const auto r = cpdp::wilcoxon_signed_rank(x, y, method);
  fmt::print("n_pairs,statistic,p_value,cliffs_delta,note\n{},{},{},{},{}\n", r.n_pairs,
             cpdp::text::format_double(r.statistic), cpdp::text::format_double(r.p_value),
             cpdp::text::format_double(r.cliffs_delta), cpdp::csv::escape(r.method_note));
  return kOk;
}

int cmd_dpr(const std::string& config_path, const std::string& results_path) {
  const auto config = cpdp::load_config(config_path);
  const auto projects = cpdp::load_datasets(config);
  std::map<std::string, cpdp::DatasetSummary> summaries;
  for (const auto& p : projects) summaries[p.name()] = cpdp::summarize(p);
  const auto path = results_path.empty() ? config.output_dir / "results.csv" : std::filesystem::path(results_path);
  std::cout << cpdp::dpr_csv(cpdp::analyze_dpr(cpdp::read_results_csv(path), summaries));
  return kOk;
}

int cmd_box(const std::string& path, const std::string& group_col, const std::string& value_col) {
  const auto records = cpdp::csv::read_file(path);
  if (records.empty()) throw cpdp::DataError("empty file");
  const auto& header = records.front().fields;
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  if (!group_col.empty()) {
    const auto g = column_index(header, group_col);
    const auto v = column_index(header, value_col.empty() ? "f_measure" : value_col);
    for (std::size_t i = 1; i < records.size(); ++i) {
      const auto& f = records[i].fields;
      auto value = cpdp::text::parse_double(cpdp::text::trim(f.at(v)));
      if (!value) continue;
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& p) { return p.first == f.at(g); });
      if (it == groups.end()) {
        groups.emplace_back(f.at(g), std::vector<double>{});
        it = groups.end() - 1;
      }
      it->second.push_back(*value);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) groups.emplace_back(header[c], numeric_column(records, c));
  }
  std::cout << cpdp::boxplot_csv(cpdp::emit_boxplot_summary(groups));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-project defect prediction with imbalanced feature sets"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t workers = 0;
  bool log_filter = false;
  long long seed = 0;

  auto* ingest = app.add_subcommand("ingest", "Validate datasets and print summaries");
  ingest->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Execute the experiment plan and write the report bundle");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_option("--workers", workers, "Concurrent pair runs (overrides config)")->check(CLI::PositiveNumber);
  run->add_flag("--log-filter", log_filter, "Apply ln(x+1) before z-score");
  run->add_option("--seed", seed, "Reserved; the pipeline is deterministic");

  std::string csv_path;
  std::string x_col;
  std::string y_col;
  std::string test_method = "auto";
  auto* compare = app.add_subcommand("compare", "Wilcoxon signed-rank test and Cliff's delta on two columns");
  compare->add_option("--csv", csv_path, "Two-column CSV, best_per_target.csv or results.csv")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--x", x_col, "First column (or method)")->required();
  compare->add_option("--y", y_col, "Second column (or method)")->required();
  compare->add_option("--test", test_method, "auto | exact | asymptotic")
      ->check(CLI::IsMember({"auto", "exact", "asymptotic"}));

  std::string results_path;
  auto* dpr = app.add_subcommand("dpr", "DPR and improvement analysis over a results file");
  dpr->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  dpr->add_option("--results", results_path, "results.csv (defaults to <output_dir>/results.csv)");

  std::string group_col;
  std::string value_col;
  auto* box = app.add_subcommand("box", "Five-number summaries with 1.5 IQR outliers");
  box->add_option("--csv", csv_path, "Input CSV")->required()->check(CLI::ExistingFile);
  box->add_option("--group", group_col, "Grouping column (long format); omit to treat each column as a group");
  box->add_option("--value", value_col, "Value column in long format (default f_measure)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*ingest) return cmd_ingest(config_path);
    if (*run) return cmd_run(config_path, overrides(out_dir, workers, log_filter));
    if (*compare) return cmd_compare(csv_path, x_col, y_col, test_method);
    if (*dpr) return cmd_dpr(config_path, results_path);
    if (*box) return cmd_box(csv_path, group_col, value_col);
  } catch (const cpdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cpdp::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}
