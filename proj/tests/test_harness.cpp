#include "cpdp/error.hpp"
#include "cpdp/harness.hpp"
#include "cpdp/profile.hpp"
#include "cpdp/text.hpp"
#include "doctest.h"
#include "synthetic.hpp"

#include <fstream>
#include <sstream>

using namespace cpdp;
using cpdp::testing::synthetic_project;

namespace {

std::vector<Project> two_family_corpus() {
  std::vector<Project> out;
  std::uint64_t seed = 500;
  for (const char* n : {"ant", "camel", "xalan"}) {
    out.push_back(synthetic_project(n, "promise", 20, 70, 0.3, 1.0, seed++));
  }
  for (const char* n : {"eclipse", "equinox", "lucene", "mylyn", "pde"}) {
    out.push_back(synthetic_project(n, "aeeem", 61, 70, 0.2, 1.0, seed++));
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ResultRow row(const std::string& source, const std::string& target, Method m, double f) {
  ResultRow r;
  r.source = source;
  r.target = target;
  r.method = m;
  r.ok = true;
  r.f_measure = f;
  return r;
}

}  // namespace

TEST_CASE("parse_config") {
  const auto j = nlohmann::json::parse(R"({
    "datasets": [
      {"name": "a", "family": "f", "path": "data/a.csv", "label_column": "bug", "ignored_columns": ["name"]},
      {"name": "b", "family": "g", "path": "/abs/b.arff", "aliases": {"LOC": "loc"}}
    ],
    "aliases": {"wmc": "complexity"},
    "preprocessing": {"log_filter": true},
    "learner": {"ridge": 0.5},
    "methods": ["ifs_our", "mix"],
    "workers": 3
  })");
  const auto cfg = parse_config(j, "/base");
  REQUIRE(cfg.datasets.size() == 2);
  CHECK(cfg.datasets[0].path == std::filesystem::path("/base/data/a.csv"));
  CHECK(cfg.datasets[0].format == "csv");
  CHECK(cfg.datasets[1].format == "arff");
  CHECK(cfg.datasets[1].path == std::filesystem::path("/abs/b.arff"));
  CHECK(cfg.datasets[0].schema.alias_map.at("wmc") == "complexity");
  CHECK(cfg.datasets[1].schema.alias_map.at("LOC") == "loc");
  CHECK(cfg.datasets[0].schema.ignored_columns == std::vector<std::string>{"name"});
  CHECK(cfg.engine.preprocessing.log_filter);
  CHECK(cfg.engine.learner.ridge == 0.5);
  CHECK(cfg.methods == std::vector<Method>{Method::IfsOur, Method::Mix});
  CHECK(cfg.workers == 3);
  CHECK_FALSE(cfg.canonical_json.empty());
}

TEST_CASE("parse_config errors") {
  auto bad = [](const char* text) { return parse_config(nlohmann::json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"datasets": []})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"datasets": [{"name": "a", "family": "f", "path": "a.csv"}], "bogus": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"datasets": [{"name": "a", "family": "f"}]})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"datasets": [{"name": "a", "family": "f", "path": "a.csv"},
                                       {"name": "a", "family": "g", "path": "b.csv"}]})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"datasets": [{"name": "a", "family": "f", "path": "a.csv"}],
                          "learner": {"ridge": -1}})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"datasets": [{"name": "a", "family": "f", "path": "a.csv"}], "methods": ["tca"]})"),
                  ConfigError);
  CHECK_THROWS_AS(bad(R"({"datasets": [{"name": "a", "family": "f", "path": "a.csv"}], "workers": 0})"),
                  ConfigError);
}

TEST_CASE("load_config with fixtures and overrides") {
  const std::filesystem::path dir = CPDP_TEST_DATA;
  const auto cfg = load_config(dir / "mini_config.json");
  const auto projects = load_datasets(cfg);
  REQUIRE(projects.size() == 2);
  CHECK(projects[0].name() == "alpha");
  CHECK(projects[1].dataset_family() == "fam_b");

  const auto patched = load_config(dir / "mini_config.json", {{"learner", {{"ridge", 0.25}}}});
  CHECK(patched.engine.learner.ridge == 0.25);
  CHECK(patched.canonical_json != cfg.canonical_json);

  CHECK_THROWS_AS(load_config(dir / "bad_config.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "does_not_exist.json"), ConfigError);

  auto broken = cfg;
  broken.datasets[0].path = dir / "missing.csv";
  CHECK_THROWS_WITH_AS(load_datasets(broken), doctest::Contains("dataset 'alpha'"), DataError);
}

TEST_CASE("run_plan over two families") {
  ExperimentConfig cfg;
  cfg.canonical_json = "{}";
  const auto projects = two_family_corpus();
  const auto bundle = run_plan(cfg, projects);

  CHECK(bundle.failures() == 0);
  std::size_t ifs_best = 0;
  std::size_t mix_best = 0;
  for (const auto& e : bundle.best) {
    ifs_best += e.method == Method::IfsOur;
    mix_best += e.method == Method::Mix;
  }
  CHECK(ifs_best == 8);
  CHECK(mix_best == 8);
  CHECK(bundle.manifest.at("plan").at("cpdp_pure") == 26);
  CHECK(bundle.manifest.at("plan").at("ifs_our") == 30);
  CHECK(bundle.manifest.at("plan").at("ifs_min") == 30);
  CHECK(bundle.manifest.at("plan").at("mix") == 8);
  CHECK(bundle.comparisons.size() == 3);
  CHECK(bundle.dpr.size() == 8);
  CHECK(bundle.coefficients.size() == 8 * kIndicatorCount);
  CHECK(bundle.manifest.at("indicators").size() == kIndicatorCount);

  for (const auto& r : bundle.results) {
    if (r.method != Method::Mix) continue;
    // Mix fuses the per-target best sources of both components.
    bool found_pure = false;
    for (const auto& e : bundle.best) {
      if (e.target == r.target && e.method == Method::CpdpPure) found_pure = e.source == r.source;
    }
    CHECK(found_pure);
  }
}

TEST_CASE("run_plan with one family and cpdp_pure only") {
  ExperimentConfig cfg;
  cfg.methods = {Method::CpdpPure};
  std::vector<Project> projects;
  for (std::uint64_t i = 0; i < 3; ++i) {
    projects.push_back(synthetic_project("p" + std::to_string(i), "promise", 10, 40, 0.3, 1.0, 900 + i));
  }
  const auto bundle = run_plan(cfg, projects);
  CHECK(bundle.results.size() == 6);
  for (const auto& r : bundle.results) CHECK(r.method == Method::CpdpPure);
  CHECK(bundle.coefficients.empty());
}

TEST_CASE("failed pairs are recorded, not fatal") {
  ExperimentConfig cfg;
  cfg.methods = {Method::IfsMin};
  std::vector<Project> projects{synthetic_project("a", "fa", 5, 40, 0.3, 1.0, 1),
                                synthetic_project("b", "fb", 5, 40, 0.0, 1.0, 2)};
  // Project b has only its forced defective row, so training on it still works,
  // but a source with a single class cannot be trained.
  Labels zeros(40, 0);
  projects.push_back(Project("c", "fc", projects[0].schema(), projects[0].matrix(), zeros));
  const auto bundle = run_plan(cfg, projects);
  CHECK(bundle.failures() == 2);
  for (const auto& r : bundle.results) {
    if (r.source == "c") {
      CHECK_FALSE(r.ok);
      CHECK(r.error.find("degenerate training set") != std::string::npos);
    }
  }
}

TEST_CASE("results are reproducible and the manifest tracks the config") {
  ExperimentConfig cfg;
  cfg.canonical_json = R"({"a":1})";
  const auto projects = two_family_corpus();
  const auto first = run_plan(cfg, projects);
  auto threaded = cfg;
  threaded.workers = 4;
  const auto second = run_plan(threaded, projects);
  CHECK(results_csv(first.results) == results_csv(second.results));
  CHECK(best_csv(first.best) == best_csv(second.best));

  const auto again = run_plan(cfg, projects);
  CHECK(again.manifest.at("config_sha256") == first.manifest.at("config_sha256"));
  auto changed = cfg;
  changed.canonical_json = R"({"a":2})";
  CHECK(run_plan(changed, projects).manifest.at("config_sha256") != first.manifest.at("config_sha256"));

  const auto dir = cpdp::testing::temp_dir("bundle");
  write_bundle(first, dir);
  for (const char* f : {"results.csv", "best_per_target.csv", "comparisons.csv", "dpr.csv", "boxplot.csv",
                        "coefficients.csv", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(std::filesystem::exists(dir / "models"));
  CHECK(slurp(dir / "results.csv") == results_csv(first.results));

  const auto reread = read_results_csv(dir / "results.csv");
  CHECK(results_csv(reread) == results_csv(first.results));
  CHECK(best_csv(best_per_target(reread)) == best_csv(first.best));
}

TEST_CASE("sha256_hex") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("best_per_target tie-break and order") {
  const std::vector<ResultRow> rows{row("b", "t1", Method::IfsOur, 0.5), row("a", "t1", Method::IfsOur, 0.5),
                                    row("c", "t2", Method::IfsOur, 0.2), row("c", "t1", Method::CpdpPure, 0.9)};
  const auto best = best_per_target(rows);
  REQUIRE(best.size() == 3);
  CHECK(best[0].method == Method::CpdpPure);
  CHECK(best[1].target == "t1");
  CHECK(best[1].source == "a");
  CHECK(best[2].target == "t2");
}

TEST_CASE("analyze_dpr") {
  std::map<std::string, DatasetSummary> s;
  s["ant"] = {745, 166, 0.223, 20};
  s["xalan"] = {885, 411, 0.464, 20};
  s["camel"] = {965, 188, 0.255, 20};
  s["lucene"] = {692, 20, 0.029, 20};

  SUBCASE("Ant to Xalan is a low-DPR pair that mix improves") {
    std::vector<ResultRow> rows{row("ant", "xalan", Method::CpdpPure, 0.40),
                                row("camel", "xalan", Method::CpdpPure, 0.30),
                                row("ant", "xalan", Method::Mix, 0.70)};
    const auto out = analyze_dpr(rows, s);
    REQUIRE(out.size() == 1);
    CHECK(out[0].source == "ant");
    CHECK(*out[0].dpr == doctest::Approx(0.48).epsilon(0.01));
    CHECK(out[0].low_dpr);
    CHECK(*out[0].improvement == doctest::Approx(0.30));
  }
  SUBCASE("a DPR of exactly the threshold is not low") {
    std::map<std::string, DatasetSummary> t;
    t["src"] = {100, 16, 0.16, 5};
    t["tgt"] = {100, 25, 0.25, 5};
    const auto out = analyze_dpr({row("src", "tgt", Method::CpdpPure, 0.5)}, t);
    CHECK(*out[0].dpr == doctest::Approx(kLowDprThreshold));
    CHECK(*out[0].dpr == 0.64);
    CHECK_FALSE(out[0].low_dpr);
    CHECK(out[0].note.find("missing mix rows") != std::string::npos);
  }
  SUBCASE("f-measures affine in DPR correlate perfectly") {
    std::map<std::string, DatasetSummary> t;
    std::vector<ResultRow> rows;
    t["tgt"] = {100, 20, 0.2, 5};
    for (int i = 1; i <= 6; ++i) {
      const std::string name = "s" + std::to_string(i);
      t[name] = {100, static_cast<std::size_t>(5 * i), 0.05 * i, 5};
      rows.push_back(row(name, "tgt", Method::IfsOur, 0.1 + 0.3 * (0.05 * i / 0.2)));
    }
    const auto out = analyze_dpr(rows, t);
    CHECK(*out[0].pearson_r == doctest::Approx(1.0));
    CHECK(out[0].candidates == 6);
    CHECK(out[0].note.find("missing cpdp_pure rows") != std::string::npos);
  }
  SUBCASE("targets without defects have undefined DPR") {
    std::map<std::string, DatasetSummary> t;
    t["src"] = {100, 16, 0.16, 5};
    t["tgt"] = {100, 0, 0.0, 5};
    const auto out = analyze_dpr({row("src", "tgt", Method::CpdpPure, 0.0)}, t);
    CHECK_FALSE(out[0].dpr.has_value());
    CHECK(out[0].note.find("DPR undefined") != std::string::npos);
  }
}

TEST_CASE("box_summary") {
  const auto b = box_summary("g", {4, 100, 1, 3, 2});
  CHECK(b.n == 5);
  CHECK(b.min == 1);
  CHECK(b.q1 == 2);
  CHECK(b.median == 3);
  CHECK(b.q3 == 4);
  CHECK(b.max == 4);
  CHECK(b.outliers == std::vector<double>{100});

  const auto flat = box_summary("c", {0.5, 0.5, 0.5});
  CHECK(flat.min == 0.5);
  CHECK(flat.max == 0.5);
  CHECK(flat.outliers.empty());

  const auto one = box_summary("one", {0.7});
  CHECK(one.median == 0.7);
  CHECK(one.q1 == 0.7);

  CHECK_THROWS_AS(box_summary("empty", {}), DataError);
  CHECK(emit_boxplot_summary({{"x", {1, 2}}, {"y", {3}}}).size() == 2);
}

TEST_CASE("compare_methods pairs by target") {
  std::vector<BestEntry> best;
  const double our[] = {0.45, 0.50, 0.28, 0.50, 0.47, 0.51, 0.32, 0.32};
  const double min[] = {0.37, 0.52, 0.26, 0.31, 0.39, 0.10, 0.30, 0.13};
  for (int i = 0; i < 8; ++i) {
    best.push_back({"t" + std::to_string(i), Method::IfsOur, "s", "", 0, 0, our[i]});
    best.push_back({"t" + std::to_string(7 - i), Method::IfsMin, "s", "", 0, 0, min[7 - i]});
  }
  const auto cmp = compare_methods(best, Method::IfsOur, Method::IfsMin);
  REQUIRE(cmp.result.has_value());
  CHECK(cmp.result->p_value == 0.03125);
  CHECK(cmp.result->cliffs_delta == 0.5);
  CHECK(cmp.targets.size() == 8);
  CHECK(compare_methods(best, Method::IfsOur, Method::Mix).note == "fewer than two shared targets");
}
