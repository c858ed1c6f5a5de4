#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cabaret/bfs.hpp"
#include "cabaret/content_graph.hpp"
#include "cabaret/demand.hpp"

namespace cabaret {

/// Expected hit ratio of a static placement under CABaRet recommendations:
///
///   CHR(C) = sum_v q_v * sum_{i=1}^{min(|C ∩ L(v)|, N)} p_i
///
/// over a weighted support of requested contents. Exploration lists L(v) are
/// computed once at construction, together with an inverted index from each
/// content to the support entries whose list contains it.
class ObjectiveSpec {
 public:
  /// `weights` are normalized to sum to 1; they must be non-negative with a
  /// positive sum. The distribution must have exactly `count` positions.
  ObjectiveSpec(std::vector<ContentId> support, std::vector<double> weights, std::size_t count,
                PositionDistribution dist, BfsParams params, const RelationOracle& oracle);

  /// Uniform weights over a front page.
  static ObjectiveSpec front_page(const PopularityRegion& region, std::size_t count,
                                  PositionDistribution dist, BfsParams params,
                                  const RelationOracle& oracle);

  double objective(std::span<const ContentId> cache) const;

  std::size_t support_size() const noexcept { return support_.size(); }
  std::span<const ContentId> support() const noexcept { return support_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t count() const noexcept { return count_; }
  const PositionDistribution& distribution() const noexcept { return dist_; }
  const BfsParams& params() const noexcept { return params_; }
  std::span<const ContentId> explored(std::size_t support_index) const;

  /// Union of all exploration lists, sorted.
  std::vector<ContentId> explored_union() const;

  /// Support entries (indices) whose exploration list contains `c`.
  std::span<const std::uint32_t> covering(ContentId c) const;

  /// CHR(counts) where counts[s] = |C ∩ L(support[s])|.
  double objective_from_counts(std::span<const std::uint32_t> counts) const;
  /// CHR(C ∪ {c}) - CHR(C) given the counts of C.
  double marginal_gain(ContentId c, std::span<const std::uint32_t> counts) const;

 private:
  std::vector<ContentId> support_;
  std::vector<double> weights_;
  std::size_t count_;
  PositionDistribution dist_;
  BfsParams params_;
  std::vector<std::vector<ContentId>> explored_;
  std::unordered_map<ContentId, std::vector<std::uint32_t>> covering_;
  /// prefix_[k] = p_1 + ... + p_k.
  std::vector<double> prefix_;
};

enum class PlacementMethod { kTop, kGreedy, kExact };

std::string_view to_string(PlacementMethod method);
PlacementMethod parse_placement_method(std::string_view text);

struct PlacementResult {
  /// Selection order for greedy; sorted by ContentId for exact; popularity
  /// order for top.
  std::vector<ContentId> chosen;
  /// Objective after each selection step (empty for top without a spec).
  std::vector<double> trajectory;
  /// Entries placed with zero marginal gain (greedy fill-in).
  std::vector<bool> zero_gain;
  PlacementMethod method = PlacementMethod::kTop;

  double value() const noexcept { return trajectory.empty() ? 0.0 : trajectory.back(); }
};

/// Lazy greedy maximization of the objective under |C| <= capacity. Ties go
/// to the smallest ContentId. When no candidate has positive gain, the
/// remaining slots are filled with the smallest unused candidates and flagged
/// in `zero_gain`. Duplicate candidates are ignored.
PlacementResult greedy_placement(const ObjectiveSpec& spec, std::size_t capacity,
                                 std::span<const ContentId> candidates);

/// Exhaustive search over `capacity`-subsets of the useful candidates (those
/// with positive stand-alone gain). Ties go to the lexicographically smallest
/// sorted set. Throws InstanceTooLargeError when more than `max_subsets`
/// subsets would be enumerated.
PlacementResult exact_placement(const ObjectiveSpec& spec, std::size_t capacity,
                                std::span<const ContentId> candidates,
                                std::uint64_t max_subsets = 10'000'000);

/// The `capacity` most popular contents.
PlacementResult top_placement(const Catalog& catalog, std::size_t capacity);

/// Adds an objective trajectory to a placement computed without a spec.
void annotate_trajectory(PlacementResult& result, const ObjectiveSpec& spec);

struct SubmodularityReport {
  std::size_t trials = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t submodularity_violations = 0;
  /// Largest violation amount seen (0 when none).
  double worst_violation = 0.0;
};

/// Samples triples A ⊆ B, x ∉ B from the explored universe and checks
/// f(A) <= f(B) and f(A+x) - f(A) >= f(B+x) - f(B), each within `tolerance`.
SubmodularityReport check_submodularity(const ObjectiveSpec& spec, std::size_t trials,
                                        std::uint64_t seed, double tolerance = 1e-12);

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace cabaret
