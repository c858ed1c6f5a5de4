#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cabaret/content_graph.hpp"
#include "cabaret/demand.hpp"

namespace cabaret {

/// Depth-1 / depth-2 overlap I(v) over a set of seed contents.
struct OverlapReport {
  std::vector<ContentId> seeds;
  std::vector<double> values;
  double median = 0.0;
  double mean = 0.0;
  std::size_t width = 0;
  std::size_t depth = 2;
};

/// Fraction of v's depth-1 related contents that reappear in the raw
/// (not de-duplicated) related lists of those depth-1 contents. 0 when v has
/// no related contents.
double overlap_fraction(ContentId v, std::size_t width, const RelationOracle& oracle);

/// overlap_fraction() for every seed plus median and mean. The median of an
/// even count is the mean of the two middle order statistics.
OverlapReport eval_iv(const PopularityRegion& seeds, std::size_t width, const RelationOracle& oracle);

/// Cache hit ratio over requests 2..K of M sessions, normalized by M (K - 1).
struct ChrReport {
  double chr = 0.0;
  /// Standard error of `chr`; 0 for exact enumeration.
  double std_error = 0.0;
  std::size_t sessions = 0;
  std::size_t steps = 0;
  /// Hits (or expected hits) at request k = 2..K; index 0 is request 2.
  std::vector<double> step_hits;
  /// step_hits / sessions.
  std::vector<double> step_rates;
  bool exact = false;
  std::size_t truncated_sessions = 0;

  double total_hits() const;
};

/// Sessions must all have two requests.
ChrReport chr_single(std::span<const Session> sessions);
/// Sessions must all share the same requested length K >= 2.
ChrReport chr_sequential(std::span<const Session> sessions);
/// Report for exact per-step hit probabilities (from enumerate_sequential).
ChrReport chr_from_expectation(std::span<const double> step_probabilities);

/// `metric,value` CSV for a report, then `k,hits,rate` rows.
std::string format_chr_csv(const ChrReport& report);
std::string format_overlap_csv(const OverlapReport& report);
std::string format_overlap_per_seed_csv(const OverlapReport& report, const Catalog& catalog);

}  // namespace cabaret
