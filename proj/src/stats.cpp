#include "cpdp/stats.hpp"

#include "cpdp/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cpdp {

ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted) {
  if (actual.size() != predicted.size()) {
    throw DataError("confusion: label and prediction counts differ");
  }
  ConfusionMatrix c;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (predicted[i] == 1) {
      actual[i] == 1 ? ++c.tp : ++c.fp;
    } else {
      actual[i] == 1 ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

Prf prf(const ConfusionMatrix& c) {
  Prf out;
  if (c.tp + c.fp > 0) out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (out.precision + out.recall > 0) {
    out.f_measure = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

double dpr(const DatasetSummary& source, const DatasetSummary& target) {
  if (!(target.defect_ratio > 0.0)) throw DataError("DPR undefined: target has no defects");
  return source.defect_ratio / target.defect_ratio;
}

double cliffs_delta(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw DataError("cliffs_delta: empty input");
  long long dominance = 0;
  for (double a : x) {
    for (double b : y) {
      if (a > b) ++dominance;
      if (a < b) --dominance;
    }
  }
  return static_cast<double>(dominance) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

bool is_zero_difference(double xi, double yi) {
  return std::abs(xi - yi) <= 1e-9 * std::max({std::abs(xi), std::abs(yi), 1e-300});
}

std::vector<double> nonzero_differences(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("wilcoxon: samples differ in length");
  if (x.size() < 2) throw DataError("wilcoxon: at least two pairs required");
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!is_zero_difference(x[i], y[i])) d.push_back(x[i] - y[i]);
  }
  if (d.empty()) throw DataError("degenerate pairing: all differences are zero");
  return d;
}

struct SignedRanks {
  std::vector<long long> doubled_ranks;  // 2 * midrank, integral
  std::vector<bool> positive;
  std::vector<std::size_t> tie_sizes;
  long long doubled_w_plus = 0;
  long long doubled_total = 0;
};

SignedRanks rank_differences(const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  SignedRanks r;
  r.doubled_ranks.assign(n, 0);
  r.positive.assign(n, false);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && nearly_equal(std::abs(d[order[i]]), std::abs(d[order[j]]))) ++j;
    // Ranks i+1..j share the midrank (i+1+j)/2.
    const auto doubled = static_cast<long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) r.doubled_ranks[order[k]] = doubled;
    r.tie_sizes.push_back(j - i);
    i = j;
  }
  for (std::size_t k = 0; k < n; ++k) {
    r.positive[k] = d[k] > 0;
    r.doubled_total += r.doubled_ranks[k];
    if (r.positive[k]) r.doubled_w_plus += r.doubled_ranks[k];
  }
  return r;
}

// Distribution of the doubled positive-rank sum over all sign assignments.
double exact_p(const SignedRanks& r) {
  const std::size_t n = r.doubled_ranks.size();
  if (n > 62) throw DataError("wilcoxon: exact test limited to 62 pairs");
  const auto total = static_cast<std::size_t>(r.doubled_total);
  std::vector<std::uint64_t> ways(total + 1, 0);
  ways[0] = 1;
  for (long long rank : r.doubled_ranks) {
    const auto step = static_cast<std::size_t>(rank);
    for (std::size_t w = total; w >= step; --w) {
      ways[w] += ways[w - step];
      if (w == step) break;
    }
  }
  const long long observed = std::min(r.doubled_w_plus, r.doubled_total - r.doubled_w_plus);
  std::uint64_t extreme = 0;
  for (std::size_t w = 0; w <= total; ++w) {
    const long long lw = static_cast<long long>(w);
    if (std::min(lw, r.doubled_total - lw) <= observed) extreme += ways[w];
  }
  return static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
}

double asymptotic_p(const SignedRanks& r) {
  const auto n = static_cast<double>(r.doubled_ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  double tie_correction = 0.0;
  for (auto t : r.tie_sizes) {
    const auto tt = static_cast<double>(t);
    tie_correction += tt * tt * tt - tt;
  }
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_correction / 48.0;
  const double z = (static_cast<double>(r.doubled_w_plus) / 2.0 - mean) / std::sqrt(variance);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

}  // namespace

ComparisonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                      WilcoxonMethod method) {
  const auto d = nonzero_differences(x, y);
  const auto ranks = rank_differences(d);

  ComparisonResult out;
  out.n_pairs = x.size();
  out.statistic =
      static_cast<double>(std::min(ranks.doubled_w_plus, ranks.doubled_total - ranks.doubled_w_plus)) /
      2.0;
  out.cliffs_delta = cliffs_delta(x, y);

  const bool exact = method == WilcoxonMethod::Exact ||
                     (method == WilcoxonMethod::Auto && d.size() <= kWilcoxonExactCutoff);
  const std::string effective = "n_eff=" + std::to_string(d.size());
  if (exact) {
    out.p_value = exact_p(ranks);
    out.method_note = "exact enumeration, " + effective;
  } else {
    out.p_value = asymptotic_p(ranks);
    out.method_note = "normal approximation, tie-corrected, no continuity correction, " + effective;
  }
  return out;
}

double wilcoxon_exact_oracle(std::span<const double> x, std::span<const double> y) {
  const auto d = nonzero_differences(x, y);
  const std::size_t n = d.size();
  if (n > 15) throw DataError("wilcoxon oracle: n too large for enumeration");

  // Doubled midrank of each |d_i|, counted directly: 2 * (#smaller) + (#tied) + 1.
  std::vector<long long> doubled(n);
  long long total = 0;
  long long w_plus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long long smaller = 0;
    long long tied = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::abs(d[i]);
      const double b = std::abs(d[j]);
      if (nearly_equal(a, b)) {
        ++tied;
      } else if (b < a) {
        ++smaller;
      }
    }
    doubled[i] = 2 * smaller + tied + 1;
    total += doubled[i];
    if (d[i] > 0) w_plus += doubled[i];
  }
  const long long observed = std::min(w_plus, total - w_plus);

  std::uint64_t extreme = 0;
  const std::uint64_t assignments = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < assignments; ++mask) {
    long long w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) w += doubled[i];
    }
    if (std::min(w, total - w) <= observed) ++extreme;
  }
  return static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson: samples differ in length");
  if (x.size() < 3) throw DataError("pearson: at least three pairs required");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DataError("pearson: zero variance");

  PearsonResult out;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = n - 2.0;
  if (std::abs(out.r) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
    boost::math::students_t dist(df);
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  }
  return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of empty sample");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace cpdp
