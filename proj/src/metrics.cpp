#include "cabaret/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "cabaret/error.hpp"

namespace cabaret {

double overlap_fraction(ContentId v, std::size_t width, const RelationOracle& oracle) {
  const auto first = oracle.related(v, width);
  if (first.empty()) return 0.0;
  std::unordered_set<ContentId> second;
  for (ContentId c : first) {
    for (ContentId r : oracle.related(c, width)) second.insert(r);
  }
  const auto shared = std::count_if(first.begin(), first.end(),
                                    [&](ContentId c) { return second.contains(c); });
  return static_cast<double>(shared) / static_cast<double>(first.size());
}

OverlapReport eval_iv(const PopularityRegion& seeds, std::size_t width, const RelationOracle& oracle) {
  if (seeds.ids.empty()) throw ParameterError("overlap needs at least one seed");
  if (width == 0) throw ParameterError("overlap width must be positive");
  OverlapReport report;
  report.seeds = seeds.ids;
  report.width = width;
  report.values.reserve(seeds.ids.size());
  for (ContentId v : seeds.ids) report.values.push_back(overlap_fraction(v, width, oracle));

  auto sorted = report.values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  report.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  report.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  return report;
}

double ChrReport::total_hits() const {
  return std::accumulate(step_hits.begin(), step_hits.end(), 0.0);
}

ChrReport chr_sequential(std::span<const Session> sessions) {
  if (sessions.empty()) throw UndefinedMetricError("hit ratio over zero sessions is undefined");
  const std::size_t steps = sessions.front().requested_length;
  if (steps < 2) throw ParameterError("hit ratio needs sessions of at least two requests");

  ChrReport r;
  r.sessions = sessions.size();
  r.steps = steps;
  r.step_hits.assign(steps - 1, 0.0);
  // Per-session hit counts feed the standard error.
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& s : sessions) {
    if (s.requested_length != steps) throw ParameterError("sessions differ in length");
    if (s.truncated) ++r.truncated_sessions;
    double h = 0.0;
    for (std::size_t k = 1; k < s.hits.size(); ++k) {
      if (s.hits[k]) {
        r.step_hits[k - 1] += 1.0;
        h += 1.0;
      }
    }
    sum += h;
    sum_sq += h * h;
  }
  const double m = static_cast<double>(r.sessions);
  const double per = static_cast<double>(steps - 1);
  r.step_rates.reserve(r.step_hits.size());
  for (double h : r.step_hits) r.step_rates.push_back(h / m);
  r.chr = sum / (m * per);
  if (r.sessions > 1) {
    const double mean = sum / m;
    const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
    r.std_error = std::sqrt(var / m) / per;
  }
  return r;
}

ChrReport chr_single(std::span<const Session> sessions) {
  if (sessions.empty()) throw UndefinedMetricError("hit ratio over zero sessions is undefined");
  for (const auto& s : sessions) {
    if (s.requested_length != 2) throw ParameterError("single-request hit ratio needs K = 2 sessions");
  }
  return chr_sequential(sessions);
}

ChrReport chr_from_expectation(std::span<const double> step_probabilities) {
  if (step_probabilities.empty()) throw UndefinedMetricError("no steps to report");
  ChrReport r;
  r.exact = true;
  r.sessions = 1;
  r.steps = step_probabilities.size() + 1;
  r.step_hits.assign(step_probabilities.begin(), step_probabilities.end());
  r.step_rates = r.step_hits;
  r.chr = r.total_hits() / static_cast<double>(step_probabilities.size());
  return r;
}

std::string format_chr_csv(const ChrReport& report) {
  std::string out = "metric,value\n";
  out += fmt::format("chr,{}\n", report.chr);
  out += fmt::format("std_error,{}\n", report.std_error);
  out += fmt::format("sessions,{}\n", report.sessions);
  out += fmt::format("K,{}\n", report.steps);
  out += fmt::format("exact,{}\n", report.exact ? 1 : 0);
  out += fmt::format("truncated_sessions,{}\n", report.truncated_sessions);
  out += "\nk,hits,rate\n";
  for (std::size_t i = 0; i < report.step_hits.size(); ++i) {
    out += fmt::format("{},{},{}\n", i + 2, report.step_hits[i], report.step_rates[i]);
  }
  return out;
}

std::string format_overlap_csv(const OverlapReport& report) {
  std::string out = "metric,value\n";
  out += fmt::format("median,{}\n", report.median);
  out += fmt::format("mean,{}\n", report.mean);
  out += fmt::format("seeds,{}\n", report.seeds.size());
  out += fmt::format("width,{}\n", report.width);
  out += fmt::format("depth,{}\n", report.depth);
  return out;
}

std::string format_overlap_per_seed_csv(const OverlapReport& report, const Catalog& catalog) {
  std::string out = "id,iv\n";
  for (std::size_t i = 0; i < report.seeds.size(); ++i) {
    out += fmt::format("{},{}\n", catalog.name(report.seeds[i]), report.values[i]);
  }
  return out;
}

}  // namespace cabaret
