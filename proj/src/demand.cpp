#include "cabaret/demand.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "cabaret/error.hpp"

namespace cabaret {

PositionDistribution position_probs(PositionLaw law, double alpha, std::size_t n) {
  if (n == 0) throw ParameterError("position distribution needs at least one position");
  PositionDistribution d;
  d.law_ = law;
  if (law == PositionLaw::kUniform) {
    d.probs_.assign(n, 1.0 / static_cast<double>(n));
  } else {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw ParameterError("Zipf exponent must be finite and non-negative");
    }
    d.alpha_ = alpha;
    d.probs_.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d.probs_[i] = std::pow(static_cast<double>(i + 1), -alpha);
      total += d.probs_[i];
    }
    for (auto& p : d.probs_) p /= total;
  }
  d.cumulative_.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += d.probs_[i];
    d.cumulative_[i] = acc;
  }
  return d;
}

std::vector<double> PositionDistribution::truncated(std::size_t n) const {
  if (n == 0 || n > probs_.size()) throw ParameterError("truncation length out of range");
  std::vector<double> out(probs_.begin(), probs_.begin() + static_cast<std::ptrdiff_t>(n));
  if (n == probs_.size()) return out;
  const double total = cumulative_[n - 1];
  for (auto& p : out) p /= total;
  return out;
}

std::size_t PositionDistribution::sample(Rng& rng, std::size_t n) const {
  if (n == 0 || n > probs_.size()) throw ParameterError("sample length out of range");
  const double x = rng.uniform() * cumulative_[n - 1];
  const auto end = cumulative_.begin() + static_cast<std::ptrdiff_t>(n);
  const auto it = std::upper_bound(cumulative_.begin(), end, x);
  return it == end ? n - 1 : static_cast<std::size_t>(it - cumulative_.begin());
}

std::string PositionDistribution::label() const {
  return DemandSpec{law_, alpha_}.label();
}

DemandSpec DemandSpec::parse(std::string_view text) {
  if (text == "uniform") return {PositionLaw::kUniform, 0.0};
  if (text == "zipf") return {PositionLaw::kZipf, 1.0};
  if (text.starts_with("zipf:")) {
    const auto num = text.substr(5);
    double alpha = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), alpha);
    if (ec != std::errc() || ptr != num.data() + num.size()) {
      throw ParameterError("bad Zipf exponent in '" + std::string(text) + "'");
    }
    if (!(alpha >= 0.0)) throw ParameterError("Zipf exponent must be non-negative");
    return {PositionLaw::kZipf, alpha};
  }
  throw ParameterError("unknown demand model '" + std::string(text) +
                       "' (expected uniform or zipf:<alpha>)");
}

std::string DemandSpec::label() const {
  if (law == PositionLaw::kUniform) return "uniform";
  return fmt::format("zipf:{}", alpha);
}

Session run_session(std::size_t steps, const PopularityRegion& front_page,
                    const RecommendFn& recommender, const CacheManifest& cache,
                    const PositionDistribution& dist, std::uint64_t seed) {
  if (steps < 1) throw ParameterError("a session needs at least one request");
  if (front_page.ids.empty()) throw ParameterError("front page is empty");
  if (dist.size() == 0) throw ParameterError("position distribution is empty");

  Rng rng(seed);
  Session s;
  s.seed = seed;
  s.requested_length = steps;
  s.watched.reserve(steps);
  s.hits.reserve(steps);

  ContentId current = front_page.ids[rng.uniform_index(front_page.ids.size())];
  s.watched.push_back(current);
  s.hits.push_back(cache.contains(current));
  for (std::size_t k = 1; k < steps; ++k) {
    const auto list = recommender(current);
    if (list.empty()) {
      s.truncated = true;
      break;
    }
    const std::size_t n = std::min(list.size(), dist.size());
    const auto& pick = list.entries[dist.sample(rng, n)];
    current = pick.id;
    s.watched.push_back(current);
    s.hits.push_back(pick.cached);
  }
  return s;
}

double enumerate_single_requests(const PopularityRegion& front_page, const RecommendFn& recommender,
                                 const PositionDistribution& dist) {
  if (front_page.ids.empty()) throw ParameterError("front page is empty");
  double total = 0.0;
  for (ContentId v : front_page.ids) {
    const auto list = recommender(v);
    if (list.empty()) continue;
    const std::size_t n = std::min(list.size(), dist.size());
    const auto p = dist.truncated(n);
    double hit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (list.entries[i].cached) hit += p[i];
    }
    total += hit;
  }
  return total / static_cast<double>(front_page.ids.size());
}

std::vector<double> enumerate_sequential(std::size_t steps, const PopularityRegion& front_page,
                                         const RecommendFn& recommender,
                                         const PositionDistribution& dist,
                                         std::size_t catalog_size) {
  if (steps < 2) throw ParameterError("sequential enumeration needs at least two requests");
  if (front_page.ids.empty()) throw ParameterError("front page is empty");

  std::vector<double> mass(catalog_size, 0.0);
  std::vector<double> next(catalog_size, 0.0);
  const double entry = 1.0 / static_cast<double>(front_page.ids.size());
  for (ContentId v : front_page.ids) mass.at(v.value()) += entry;

  // Lists are fetched at most once per content across all steps.
  std::vector<std::optional<RecommendationList>> lists(catalog_size);
  std::vector<double> hits;
  hits.reserve(steps - 1);
  for (std::size_t k = 1; k < steps; ++k) {
    double hit = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < catalog_size; ++i) {
      if (mass[i] == 0.0) continue;
      if (!lists[i]) lists[i] = recommender(ContentId(static_cast<ContentId::value_type>(i)));
      const auto& list = *lists[i];
      // Empty lists end the session; their mass leaves the chain.
      if (list.empty()) continue;
      const std::size_t n = std::min(list.size(), dist.size());
      const auto p = dist.truncated(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double m = mass[i] * p[j];
        if (list.entries[j].cached) hit += m;
        next.at(list.entries[j].id.value()) += m;
      }
    }
    // Rounding can push a certain hit a few ulps past 1.
    hits.push_back(std::min(hit, 1.0));
    mass.swap(next);
  }
  return hits;
}

}  // namespace cabaret
