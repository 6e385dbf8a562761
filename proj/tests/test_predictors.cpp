#include "cpdp/error.hpp"
#include "cpdp/predictors.hpp"
#include "cpdp/profile.hpp"
#include "doctest.h"
#include "synthetic.hpp"

#include <algorithm>
#include <random>

using namespace cpdp;
using cpdp::testing::synthetic_project;

namespace {

EngineParams defaults() { return {}; }

Project renamed_columns(const Project& p, const std::string& name, const std::string& prefix) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p.feature_count(); ++j) names.push_back(prefix + std::to_string(j));
  return Project(name, p.dataset_family(), FeatureSchema(names, "bug"), p.matrix(), p.labels());
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (Method m : {Method::CpdpPure, Method::IfsOur, Method::IfsMin, Method::Mix}) {
    CHECK(method_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(method_from_string("tca"), ConfigError);
}

TEST_CASE("cpdp_pure on a shared schema") {
  const auto ant = synthetic_project("ant", "promise", 20, 120, 0.22, 1.0, 1);
  const auto camel = synthetic_project("camel", "promise", 20, 150, 0.19, 1.0, 2);
  const auto out = run_cpdp_pure(ant, camel, defaults());
  CHECK(out.predicted.size() == camel.instance_count());
  CHECK(out.confusion.total() == camel.instance_count());
  CHECK(out.probabilities.has_value());
  CHECK(out.model.has_value());
  CHECK(out.f_measure > cpdp::testing::random_baseline_f(camel.labels()));
}

TEST_CASE("cpdp_pure aligns reordered target columns") {
  const auto src = synthetic_project("s", "f", 5, 80, 0.3, 1.0, 3);
  const auto tgt = synthetic_project("t", "f", 5, 80, 0.3, 1.0, 4);
  const auto shuffled = tgt.select_columns({4, 2, 0, 1, 3});
  const auto a = run_cpdp_pure(src, tgt, defaults());
  const auto b = run_cpdp_pure(src, shuffled, defaults());
  CHECK(a.predicted == b.predicted);
}

TEST_CASE("cpdp_pure rejects mismatched schemas and self pairs") {
  const auto promise = synthetic_project("ant", "promise", 20, 50, 0.3, 1.0, 5);
  const auto aeeem = synthetic_project("eclipse", "aeeem", 61, 50, 0.3, 1.0, 6);
  CHECK_THROWS_WITH_AS(run_cpdp_pure(promise, aeeem, defaults()), doctest::Contains("feature sets differ"),
                       DataError);
  CHECK_THROWS_AS(run_cpdp_pure(promise, promise, defaults()), DataError);
}

TEST_CASE("ifs_our across heterogeneous metric sets") {
  const auto eclipse = synthetic_project("eclipse", "aeeem", 76, 200, 0.2, 1.0, 7, "e");
  const auto ant = synthetic_project("ant", "promise", 20, 150, 0.22, 1.0, 8);
  const auto out = run_ifs_our(eclipse, ant, defaults());
  CHECK(out.method == Method::IfsOur);
  CHECK(out.predicted.size() == ant.instance_count());
  REQUIRE(out.model.has_value());
  CHECK(out.model->weights.size() == static_cast<Eigen::Index>(kIndicatorCount));

  const auto one = synthetic_project("tiny", "other", 1, 40, 0.4, 1.0, 9, "t");
  const auto from_one = run_ifs_our(one, ant, defaults());
  CHECK(from_one.predicted.size() == ant.instance_count());
}

TEST_CASE("ifs_our on a renamed duplicate matches the self-profile model") {
  const auto target = synthetic_project("target", "fam_a", 12, 90, 0.35, 1.2, 10);
  const auto twin = renamed_columns(target, "twin", "x");
  const auto cross = run_ifs_our(twin, target, defaults());

  const auto profiled = characterize_project(target, defaults().preprocessing);
  const auto self = train(profiled.matrix, profiled.labels, defaults().learner);
  CHECK(cross.predicted == classify(self, profiled.matrix));
}

TEST_CASE("ifs_min") {
  const auto promise = synthetic_project("ant", "promise", 20, 60, 0.3, 1.0, 11);
  const auto aeeem = synthetic_project("eclipse", "aeeem", 61, 60, 0.3, 1.0, 12);
  const auto relink = synthetic_project("apache", "relink", 26, 60, 0.3, 1.0, 13, "r");

  const auto overlap = run_ifs_min(aeeem, promise, defaults());
  REQUIRE(overlap.model.has_value());
  CHECK(overlap.model->weights.size() == 20);
  CHECK_THROWS_WITH_AS(run_ifs_min(promise, relink, defaults()), doctest::Contains("no common metrics"),
                       DataError);
}

TEST_CASE("property: ifs_min equals cpdp_pure bitwise on shared schemas") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t k = 1 + seed % 9;
    const auto s = synthetic_project("s", "f", k, 30 + seed, 0.3, 0.8, 1000 + seed);
    const auto t = synthetic_project("t", "f", k, 25 + seed, 0.3, 0.8, 2000 + seed);
    const auto a = run_cpdp_pure(s, t, defaults());
    const auto b = run_ifs_min(s, t, defaults());
    CHECK(a.predicted == b.predicted);
    CHECK(*a.probabilities == *b.probabilities);
    CHECK(a.model->weights == b.model->weights);
    CHECK(a.model->intercept == b.model->intercept);
  }
}

TEST_CASE("fuse_or") {
  CHECK(fuse_or({1, 0, 0}, {0, 0, 1}) == Labels{1, 0, 1});
  CHECK(fuse_or({0, 0}, {0, 0}) == Labels{0, 0});
  CHECK_THROWS_AS(fuse_or({1}, {1, 0}), DataError);
}

TEST_CASE("property: mix recall dominates its components") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t s = rng();
    const auto same = synthetic_project("same", "fa", 4, 20 + s % 15, 0.3, 0.6, s);
    const auto diff = synthetic_project("diff", "fb", 3 + s % 5, 20 + s % 11, 0.4, 0.6, s + 1, "d");
    const auto target = synthetic_project("target", "fa", 4, 20 + s % 13, 0.35, 0.6, s + 2);
    const auto pure = run_cpdp_pure(same, target, defaults());
    const auto ifs = run_ifs_our(diff, target, defaults());
    const auto mix = run_mix(same, diff, target, defaults());
    CHECK(mix.predicted == fuse_or(pure.predicted, ifs.predicted));
    CHECK(mix.recall >= std::max(pure.recall, ifs.recall));
    CHECK(mix.confusion.fn <= std::min(pure.confusion.fn, ifs.confusion.fn));
    CHECK_FALSE(mix.probabilities.has_value());
    CHECK(mix.second_source_name == "diff");
  }
}

TEST_CASE("enumerate_pairs") {
  std::vector<Project> promise;
  for (const char* n : {"ant", "camel", "xalan"}) {
    promise.push_back(synthetic_project(n, "promise", 20, 10, 0.3, 1.0, 1));
  }
  const auto six = enumerate_pairs(promise, Method::CpdpPure);
  CHECK(six.size() == 6);
  for (const auto& p : six) CHECK(p.source != p.target);
  CHECK(enumerate_pairs(promise, Method::IfsOur).empty());

  const auto corpus = cpdp::testing::three_family_corpus(10);
  CHECK(enumerate_pairs(corpus, Method::CpdpPure).size() == 32);
  CHECK(enumerate_pairs(corpus, Method::IfsOur).size() == 78);
  CHECK(enumerate_pairs(corpus, Method::IfsMin).size() == 30);
  CHECK(enumerate_pairs(corpus, Method::Mix).size() == 110);

  const std::vector<Project> single{promise.front()};
  for (Method m : {Method::CpdpPure, Method::IfsOur, Method::IfsMin, Method::Mix}) {
    CHECK(enumerate_pairs(single, m).empty());
  }
}

TEST_CASE("engines are deterministic") {
  const auto s = synthetic_project("s", "fa", 8, 70, 0.3, 1.0, 31);
  const auto d = synthetic_project("d", "fb", 5, 70, 0.3, 1.0, 32, "d");
  const auto t = synthetic_project("t", "fa", 8, 70, 0.3, 1.0, 33);
  for (int i = 0; i < 2; ++i) {
    CHECK(run_cpdp_pure(s, t, defaults()).probabilities == run_cpdp_pure(s, t, defaults()).probabilities);
    CHECK(run_ifs_our(d, t, defaults()).probabilities == run_ifs_our(d, t, defaults()).probabilities);
    CHECK(run_mix(s, d, t, defaults()).predicted == run_mix(s, d, t, defaults()).predicted);
  }
}
