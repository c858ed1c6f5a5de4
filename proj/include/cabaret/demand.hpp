#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cabaret/content_graph.hpp"
#include "cabaret/recommender.hpp"
#include "cabaret/rng.hpp"

namespace cabaret {

enum class PositionLaw { kUniform, kZipf };

/// Probability of picking the i-th recommendation, independent of content.
class PositionDistribution {
 public:
  PositionDistribution() = default;

  PositionLaw law() const noexcept { return law_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_.at(i); }

  /// First n probabilities renormalized to sum to 1 (n <= size()).
  std::vector<double> truncated(std::size_t n) const;

  /// Position in [0, n) drawn from truncated(n); n must be in [1, size()].
  std::size_t sample(Rng& rng, std::size_t n) const;

  /// "uniform" or "zipf:<alpha>".
  std::string label() const;

  friend PositionDistribution position_probs(PositionLaw law, double alpha, std::size_t n);

 private:
  PositionLaw law_ = PositionLaw::kUniform;
  double alpha_ = 0.0;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// Uniform (p_i = 1/n) or Zipf (p_i ∝ i^-alpha). `alpha` is ignored for
/// uniform. n == 0 or alpha < 0 is a ParameterError.
PositionDistribution position_probs(PositionLaw law, double alpha, std::size_t n);

/// Demand model named by a label: "uniform", "zipf:<alpha>" or "zipf" (alpha 1).
struct DemandSpec {
  PositionLaw law = PositionLaw::kUniform;
  double alpha = 0.0;

  static DemandSpec parse(std::string_view text);
  std::string label() const;
  PositionDistribution distribution(std::size_t n) const { return position_probs(law, alpha, n); }

  friend bool operator==(const DemandSpec&, const DemandSpec&) = default;
};

using RecommendFn = std::function<RecommendationList(ContentId)>;

/// One user's watch sequence. hits[k] tells whether watched[k] was cached.
struct Session {
  std::vector<ContentId> watched;
  std::vector<bool> hits;
  std::uint64_t seed = 0;
  /// The session ended early because a recommendation list was empty.
  bool truncated = false;
  std::size_t requested_length = 0;
};

/// Enters on a uniformly random front-page content, then follows `steps - 1`
/// recommendations, choosing position i with probability p_i (renormalized
/// over lists shorter than the distribution).
Session run_session(std::size_t steps, const PopularityRegion& front_page,
                    const RecommendFn& recommender, const CacheManifest& cache,
                    const PositionDistribution& dist, std::uint64_t seed);

/// Exact single-request hit ratio: the mean over front-page entries of the
/// probability that the second request is cached.
double enumerate_single_requests(const PopularityRegion& front_page, const RecommendFn& recommender,
                                 const PositionDistribution& dist);

/// Exact expected hit probability at steps 2..steps, obtained by pushing the
/// watch distribution through the recommendation chain. Index 0 is step 2.
std::vector<double> enumerate_sequential(std::size_t steps, const PopularityRegion& front_page,
                                         const RecommendFn& recommender,
                                         const PositionDistribution& dist,
                                         std::size_t catalog_size);

}  // namespace cabaret
