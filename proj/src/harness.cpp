#include "cpdp/harness.hpp"

#include "cpdp/csv.hpp"
#include "cpdp/error.hpp"
#include "cpdp/profile.hpp"
#include "cpdp/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace cpdp {

namespace {

constexpr const char* kToolVersion = "1.0.0";

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
}

ResultRow failed_row(const std::string& source, const std::string& second, const std::string& target,
                     Method method, const std::string& error) {
  ResultRow row;
  row.source = source;
  row.second_source = second;
  row.target = target;
  row.method = method;
  row.error = error;
  return row;
}

std::string model_stem(const PredictionOutcome& o) {
  return std::string(to_string(o.method)) + "__" + o.source_name + "__" + o.target_name;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? text::format_double(*v) : ""; }

}  // namespace

ResultRow to_row(const PredictionOutcome& o) {
  ResultRow row;
  row.source = o.source_name;
  row.second_source = o.second_source_name;
  row.target = o.target_name;
  row.method = o.method;
  row.ok = true;
  row.instances = o.predicted.size();
  row.confusion = o.confusion;
  row.precision = o.precision;
  row.recall = o.recall;
  row.f_measure = o.f_measure;
  return row;
}

std::vector<BestEntry> best_per_target(const std::vector<ResultRow>& rows) {
  std::vector<std::string> target_order;
  for (const auto& r : rows) {
    if (std::find(target_order.begin(), target_order.end(), r.target) == target_order.end()) {
      target_order.push_back(r.target);
    }
  }
  std::vector<BestEntry> out;
  for (auto method : {Method::CpdpPure, Method::IfsOur, Method::IfsMin, Method::Mix}) {
    for (const auto& target : target_order) {
      const ResultRow* best = nullptr;
      for (const auto& r : rows) {
        if (!r.ok || r.method != method || r.target != target) continue;
        if (!best || r.f_measure > best->f_measure ||
            (r.f_measure == best->f_measure &&
             std::tie(r.source, r.second_source) < std::tie(best->source, best->second_source))) {
          best = &r;
        }
      }
      if (best) {
        out.push_back({target, method, best->source, best->second_source, best->precision, best->recall,
                       best->f_measure});
      }
    }
  }
  return out;
}

MethodComparison compare_methods(const std::vector<BestEntry>& best, Method a, Method b) {
  MethodComparison cmp;
  cmp.a = a;
  cmp.b = b;
  std::vector<double> xa;
  std::vector<double> xb;
  for (const auto& ea : best) {
    if (ea.method != a) continue;
    for (const auto& eb : best) {
      if (eb.method == b && eb.target == ea.target) {
        cmp.targets.push_back(ea.target);
        xa.push_back(ea.f_measure);
        xb.push_back(eb.f_measure);
      }
    }
  }
  if (xa.size() < 2) {
    cmp.note = "fewer than two shared targets";
    return cmp;
  }
  try {
    cmp.result = wilcoxon_signed_rank(xa, xb);
    cmp.note = cmp.result->method_note;
  } catch (const DataError& e) {
    cmp.note = e.what();
  }
  return cmp;
}

std::vector<DprRow> analyze_dpr(const std::vector<ResultRow>& rows,
                                const std::map<std::string, DatasetSummary>& summaries,
                                Method correlation_method) {
  const auto best = best_per_target(rows);
  auto find_best = [&](const std::string& target, Method m) -> const BestEntry* {
    for (const auto& e : best) {
      if (e.target == target && e.method == m) return &e;
    }
    return nullptr;
  };
  auto ratio = [&](const std::string& source, const std::string& target) -> std::optional<double> {
    auto s = summaries.find(source);
    auto t = summaries.find(target);
    if (s == summaries.end() || t == summaries.end() || !(t->second.defect_ratio > 0)) return std::nullopt;
    return dpr(s->second, t->second);
  };

  std::vector<std::string> targets;
  for (const auto& r : rows) {
    if (std::find(targets.begin(), targets.end(), r.target) == targets.end()) targets.push_back(r.target);
  }

  std::vector<DprRow> out;
  for (const auto& target : targets) {
    DprRow row;
    row.target = target;
    std::vector<std::string> notes;
    const auto* pure = find_best(target, Method::CpdpPure);
    const auto* mix = find_best(target, Method::Mix);
    if (pure) {
      row.source = pure->source;
      row.f_pure = pure->f_measure;
      row.dpr = ratio(pure->source, target);
      if (!row.dpr) notes.push_back("DPR undefined");
      row.low_dpr = row.dpr && *row.dpr < kLowDprThreshold;
    } else {
      notes.push_back("missing cpdp_pure rows");
    }
    if (mix) {
      row.f_mix = mix->f_measure;
    } else {
      notes.push_back("missing mix rows");
    }
    if (row.f_pure && row.f_mix) row.improvement = *row.f_mix - *row.f_pure;

    std::vector<double> dprs;
    std::vector<double> fs;
    for (const auto& r : rows) {
      if (!r.ok || r.target != target || r.method != correlation_method) continue;
      if (auto d = ratio(r.source, target)) {
        dprs.push_back(*d);
        fs.push_back(r.f_measure);
      }
    }
    row.candidates = dprs.size();
    try {
      const auto pr = pearson(dprs, fs);
      row.pearson_r = pr.r;
      row.pearson_p = pr.p_value;
    } catch (const DataError& e) {
      notes.push_back(std::string("no correlation: ") + e.what());
    }
    for (std::size_t i = 0; i < notes.size(); ++i) row.note += (i ? "; " : "") + notes[i];
    out.push_back(std::move(row));
  }
  return out;
}

BoxSummary box_summary(const std::string& group, std::vector<double> values) {
  if (values.empty()) throw DataError("empty group '" + group + "'");
  std::sort(values.begin(), values.end());
  BoxSummary b;
  b.group = group;
  b.n = values.size();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo = b.q1 - 1.5 * iqr;
  const double hi = b.q3 + 1.5 * iqr;
  bool any = false;
  for (double v : values) {
    if (v < lo || v > hi) {
      b.outliers.push_back(v);
      continue;
    }
    if (!any) b.min = v;
    b.max = v;
    any = true;
  }
  return b;
}

std::vector<BoxSummary> emit_boxplot_summary(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups) {
  std::vector<BoxSummary> out;
  for (const auto& [name, values] : groups) out.push_back(box_summary(name, values));
  return out;
}

std::size_t ReportBundle::failures() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.ok; }));
}

ReportBundle run_plan(const ExperimentConfig& config) {
  return run_plan(config, load_datasets(config));
}

ReportBundle run_plan(const ExperimentConfig& config, const std::vector<Project>& projects) {
  const auto& methods = config.methods;
  auto wants = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };

  // Mix needs its component runs to pick sources.
  std::vector<Method> single;
  for (auto m : {Method::CpdpPure, Method::IfsOur, Method::IfsMin}) {
    if (wants(m) || (wants(Method::Mix) && m != Method::IfsMin)) single.push_back(m);
  }
  PairPlan plan;
  nlohmann::json plan_counts = nlohmann::json::object();
  for (auto m : single) {
    auto p = enumerate_pairs(projects, m);
    plan_counts[std::string(to_string(m))] = p.size();
    plan.insert(plan.end(), p.begin(), p.end());
  }

  ReportBundle bundle;
  std::vector<ResultRow> rows(plan.size());
  std::vector<std::optional<PredictionOutcome>> outcomes(plan.size());
  parallel_for(plan.size(), config.workers, [&](std::size_t i) {
    const auto& pp = plan[i];
    const auto& s = projects[pp.source];
    const auto& t = projects[pp.target];
    try {
      PredictionOutcome o;
      switch (pp.method) {
        case Method::CpdpPure: o = run_cpdp_pure(s, t, config.engine); break;
        case Method::IfsOur: o = run_ifs_our(s, t, config.engine); break;
        case Method::IfsMin: o = run_ifs_min(s, t, config.engine); break;
        case Method::Mix: break;
      }
      rows[i] = to_row(o);
      outcomes[i] = std::move(o);
    } catch (const std::exception& e) {
      rows[i] = failed_row(s.name(), "", t.name(), pp.method, e.what());
    }
  });

  if (wants(Method::Mix)) {
    const auto best = best_per_target(rows);
    struct MixJob {
      std::size_t same, diff, target;
    };
    std::vector<MixJob> jobs;
    auto index_of = [&](const std::string& name) {
      for (std::size_t k = 0; k < projects.size(); ++k) {
        if (projects[k].name() == name) return k;
      }
      throw DataError("unknown project '" + name + "'");
    };
    for (std::size_t t = 0; t < projects.size(); ++t) {
      const BestEntry* pure = nullptr;
      const BestEntry* ifs = nullptr;
      for (const auto& e : best) {
        if (e.target != projects[t].name()) continue;
        if (e.method == Method::CpdpPure) pure = &e;
        if (e.method == Method::IfsOur) ifs = &e;
      }
      if (pure && ifs) jobs.push_back({index_of(pure->source), index_of(ifs->source), t});
    }
    plan_counts["mix"] = jobs.size();
    std::vector<ResultRow> mix_rows(jobs.size());
    parallel_for(jobs.size(), config.workers, [&](std::size_t i) {
      const auto& job = jobs[i];
      try {
        mix_rows[i] = to_row(run_mix(projects[job.same], projects[job.diff], projects[job.target], config.engine));
      } catch (const std::exception& e) {
        mix_rows[i] = failed_row(projects[job.same].name(), projects[job.diff].name(),
                                 projects[job.target].name(), Method::Mix, e.what());
      }
    });
    rows.insert(rows.end(), mix_rows.begin(), mix_rows.end());
  }

  bundle.results = std::move(rows);
  bundle.best = best_per_target(bundle.results);

  const std::vector<std::pair<Method, Method>> comparisons{
      {Method::IfsOur, Method::IfsMin}, {Method::IfsOur, Method::CpdpPure}, {Method::Mix, Method::CpdpPure}};
  for (auto [a, b] : comparisons) {
    if (wants(a) && wants(b)) bundle.comparisons.push_back(compare_methods(bundle.best, a, b));
  }

  std::map<std::string, DatasetSummary> summaries;
  for (const auto& p : projects) summaries[p.name()] = summarize(p);
  if (wants(Method::CpdpPure) || wants(Method::Mix)) bundle.dpr = analyze_dpr(bundle.results, summaries);

  // f-measure distribution per (target, method) across candidate sources.
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (const auto& e : bundle.best) {
    if (e.method == Method::Mix) continue;
    std::vector<double> values;
    for (const auto& r : bundle.results) {
      if (r.ok && r.method == e.method && r.target == e.target) values.push_back(r.f_measure);
    }
    groups.emplace_back(e.target + "/" + std::string(to_string(e.method)), std::move(values));
  }
  bundle.boxplots = emit_boxplot_summary(groups);

  for (const auto& o : outcomes) {
    if (o && o->model) bundle.models[model_stem(*o)] = to_json(*o->model);
  }
  for (const auto& e : bundle.best) {
    if (e.method != Method::IfsOur) continue;
    for (const auto& o : outcomes) {
      if (!o || o->method != Method::IfsOur || o->target_name != e.target || o->source_name != e.source) continue;
      for (const auto& [name, mag] : coefficient_magnitudes(*o->model)) {
        bundle.coefficients.push_back({e.target, e.source, name, mag});
      }
    }
  }

  std::size_t executed = bundle.results.size();
  bundle.manifest = {
      {"tool", "cpdp"},
      {"version", kToolVersion},
      {"config_sha256", sha256_hex(config.canonical_json)},
      {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
      {"datasets", projects.size()},
      {"plan", plan_counts},
      {"enumeration", "rule-driven: within-family ordered pairs for cpdp_pure; cross-family for ifs methods; "
                      "ifs_min skips pairs without common metrics"},
      {"executed", executed},
      {"failed", bundle.failures()},
      {"mix_repeats", config.mix_repeats},
      {"mix_repeat_note", "pipeline is deterministic; repeated mix runs coincide and are executed once"},
      {"preprocessing", {{"log_filter", config.engine.preprocessing.log_filter},
                         {"zscore", config.engine.preprocessing.zscore}}},
      {"indicators", std::vector<std::string>(indicator_names().begin(), indicator_names().end())},
  };
  return bundle;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = "source,second_source,target,method,status,instances,tp,fp,tn,fn,precision,recall,f_measure,error\n";
  for (const auto& r : rows) {
    out += csv::join({r.source, r.second_source, r.target, std::string(to_string(r.method)),
                      r.ok ? "ok" : "failed", r.ok ? std::to_string(r.instances) : "",
                      r.ok ? std::to_string(r.confusion.tp) : "", r.ok ? std::to_string(r.confusion.fp) : "",
                      r.ok ? std::to_string(r.confusion.tn) : "", r.ok ? std::to_string(r.confusion.fn) : "",
                      r.ok ? text::format_double(r.precision) : "", r.ok ? text::format_double(r.recall) : "",
                      r.ok ? text::format_double(r.f_measure) : "", r.error}) +
           "\n";
  }
  return out;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  const auto records = csv::read_file(path);
  if (records.empty()) throw DataError("empty results file '" + path.string() + "'");
  const auto& header = records.front().fields;
  auto col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("results file lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_source = col("source"), c_second = col("second_source"), c_target = col("target"),
             c_method = col("method"), c_status = col("status"), c_m = col("instances"), c_tp = col("tp"),
             c_fp = col("fp"), c_tn = col("tn"), c_fn = col("fn"), c_p = col("precision"), c_r = col("recall"),
             c_f = col("f_measure"), c_err = col("error");
  auto number = [&](const std::string& s, std::size_t line) {
    auto v = text::parse_double(s);
    if (!v) throw DataError("results file: bad number '" + s + "' at line " + std::to_string(line));
    return *v;
  };
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != header.size()) throw DataError("results file: row arity mismatch at line " + std::to_string(records[i].line));
    ResultRow r;
    r.source = f[c_source];
    r.second_source = f[c_second];
    r.target = f[c_target];
    r.method = method_from_string(f[c_method]);
    r.ok = f[c_status] == "ok";
    r.error = f[c_err];
    if (r.ok) {
      const auto line = records[i].line;
      r.instances = static_cast<std::size_t>(number(f[c_m], line));
      r.confusion = {static_cast<std::size_t>(number(f[c_tp], line)), static_cast<std::size_t>(number(f[c_fp], line)),
                     static_cast<std::size_t>(number(f[c_tn], line)), static_cast<std::size_t>(number(f[c_fn], line))};
      r.precision = number(f[c_p], line);
      r.recall = number(f[c_r], line);
      r.f_measure = number(f[c_f], line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string best_csv(const std::vector<BestEntry>& best) {
  std::string out = "target,method,source,second_source,precision,recall,f_measure\n";
  for (const auto& e : best) {
    out += csv::join({e.target, std::string(to_string(e.method)), e.source, e.second_source,
                      text::format_double(e.precision), text::format_double(e.recall),
                      text::format_double(e.f_measure)}) +
           "\n";
  }
  return out;
}

std::string comparisons_csv(const std::vector<MethodComparison>& comparisons) {
  std::string out = "method_a,method_b,n_pairs,statistic,p_value,cliffs_delta,note\n";
  for (const auto& c : comparisons) {
    const auto& r = c.result;
    out += csv::join({std::string(to_string(c.a)), std::string(to_string(c.b)), std::to_string(c.targets.size()),
                      r ? text::format_double(r->statistic) : "", r ? text::format_double(r->p_value) : "",
                      r ? text::format_double(r->cliffs_delta) : "", c.note}) +
           "\n";
  }
  return out;
}

std::string dpr_csv(const std::vector<DprRow>& rows) {
  std::string out = "target,source,dpr,f_pure,f_mix,improvement,low_dpr,pearson_r,pearson_p,candidates,note\n";
  for (const auto& r : rows) {
    out += csv::join({r.target, r.source, fmt_opt(r.dpr), fmt_opt(r.f_pure), fmt_opt(r.f_mix),
                      fmt_opt(r.improvement), r.low_dpr ? "1" : "0", fmt_opt(r.pearson_r), fmt_opt(r.pearson_p),
                      std::to_string(r.candidates), r.note}) +
           "\n";
  }
  return out;
}

std::string boxplot_csv(const std::vector<BoxSummary>& boxes) {
  std::string out = "group,n,min,q1,median,q3,max,outliers\n";
  for (const auto& b : boxes) {
    std::string outliers;
    for (std::size_t i = 0; i < b.outliers.size(); ++i) outliers += (i ? ";" : "") + text::format_double(b.outliers[i]);
    out += csv::join({b.group, std::to_string(b.n), text::format_double(b.min), text::format_double(b.q1),
                      text::format_double(b.median), text::format_double(b.q3), text::format_double(b.max),
                      outliers}) +
           "\n";
  }
  return out;
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "models");
  auto write = [&](const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    out << content;
  };
  write(dir / "results.csv", results_csv(bundle.results));
  write(dir / "best_per_target.csv", best_csv(bundle.best));
  write(dir / "comparisons.csv", comparisons_csv(bundle.comparisons));
  write(dir / "dpr.csv", dpr_csv(bundle.dpr));
  write(dir / "boxplot.csv", boxplot_csv(bundle.boxplots));
  std::string coeffs = "target,source,indicator,abs_coefficient\n";
  for (const auto& c : bundle.coefficients) {
    coeffs += csv::join({c.target, c.source, c.indicator, text::format_double(c.magnitude)}) + "\n";
  }
  write(dir / "coefficients.csv", coeffs);
  for (const auto& [stem, model] : bundle.models) write(dir / "models" / (stem + ".json"), model.dump(2) + "\n");
  write(dir / "manifest.json", bundle.manifest.dump(2) + "\n");
}

std::string sha256_hex(const std::string& content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

}  // namespace cpdp
