#include "cabaret/cache_policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "cabaret/error.hpp"
#include "cabaret/rng.hpp"

namespace cabaret {
namespace {

std::vector<ContentId> sorted_unique(std::span<const ContentId> ids) {
  std::vector<ContentId> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ObjectiveSpec::ObjectiveSpec(std::vector<ContentId> support, std::vector<double> weights,
                             std::size_t count, PositionDistribution dist, BfsParams params,
                             const RelationOracle& oracle)
    : support_(std::move(support)),
      weights_(std::move(weights)),
      count_(count),
      dist_(std::move(dist)),
      params_(params) {
  params_.validate();
  if (count_ == 0) throw ParameterError("recommendation count must be positive");
  if (dist_.size() != count_) throw ParameterError("position distribution length must equal N");
  if (support_.size() != weights_.size()) throw ParameterError("support and weights differ in length");
  if (support_.empty()) throw ParameterError("objective support is empty");
  if (sorted_unique(support_).size() != support_.size()) {
    throw ParameterError("objective support repeats a content");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("support weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ParameterError("support weights sum to zero");
  for (auto& w : weights_) w /= total;

  explored_.reserve(support_.size());
  for (std::size_t s = 0; s < support_.size(); ++s) {
    explored_.push_back(bfs(support_[s], params_, oracle).ids());
    for (ContentId c : explored_.back()) covering_[c].push_back(static_cast<std::uint32_t>(s));
  }

  prefix_.assign(count_ + 1, 0.0);
  for (std::size_t i = 0; i < count_; ++i) prefix_[i + 1] = prefix_[i] + dist_[i];
}

ObjectiveSpec ObjectiveSpec::front_page(const PopularityRegion& region, std::size_t count,
                                        PositionDistribution dist, BfsParams params,
                                        const RelationOracle& oracle) {
  std::vector<double> weights(region.ids.size(), 1.0);
  return ObjectiveSpec(region.ids, std::move(weights), count, std::move(dist), params, oracle);
}

std::span<const ContentId> ObjectiveSpec::explored(std::size_t support_index) const {
  return explored_.at(support_index);
}

std::vector<ContentId> ObjectiveSpec::explored_union() const {
  std::vector<ContentId> out;
  out.reserve(covering_.size());
  for (const auto& [c, _] : covering_) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

std::span<const std::uint32_t> ObjectiveSpec::covering(ContentId c) const {
  auto it = covering_.find(c);
  if (it == covering_.end()) return {};
  return it->second;
}

double ObjectiveSpec::objective_from_counts(std::span<const std::uint32_t> counts) const {
  double total = 0.0;
  for (std::size_t s = 0; s < support_.size(); ++s) {
    total += weights_[s] * prefix_[std::min<std::size_t>(counts[s], count_)];
  }
  return total;
}

double ObjectiveSpec::marginal_gain(ContentId c, std::span<const std::uint32_t> counts) const {
  double gain = 0.0;
  for (std::uint32_t s : covering(c)) {
    if (counts[s] < count_) gain += weights_[s] * dist_[counts[s]];
  }
  return gain;
}

double ObjectiveSpec::objective(std::span<const ContentId> cache) const {
  std::vector<std::uint32_t> counts(support_.size(), 0);
  for (ContentId c : sorted_unique(cache)) {
    for (std::uint32_t s : covering(c)) ++counts[s];
  }
  return objective_from_counts(counts);
}

std::string_view to_string(PlacementMethod method) {
  switch (method) {
    case PlacementMethod::kTop:
      return "top";
    case PlacementMethod::kGreedy:
      return "greedy";
    case PlacementMethod::kExact:
      return "exact";
  }
  return "?";
}

PlacementMethod parse_placement_method(std::string_view text) {
  if (text == "top") return PlacementMethod::kTop;
  if (text == "greedy") return PlacementMethod::kGreedy;
  if (text == "exact") return PlacementMethod::kExact;
  throw ParameterError("unknown placement method '" + std::string(text) +
                       "' (expected top, greedy or exact)");
}

PlacementResult greedy_placement(const ObjectiveSpec& spec, std::size_t capacity,
                                 std::span<const ContentId> candidates) {
  if (capacity == 0) throw ParameterError("cache capacity must be positive");
  const auto pool = sorted_unique(candidates);

  PlacementResult result;
  result.method = PlacementMethod::kGreedy;
  std::vector<std::uint32_t> counts(spec.support_size(), 0);

  struct Bound {
    double gain;
    ContentId id;
    std::size_t step;
  };
  // Highest gain first; equal gains pop the smaller id first.
  auto lower = [](const Bound& a, const Bound& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.id > b.id;
  };
  std::priority_queue<Bound, std::vector<Bound>, decltype(lower)> heap(lower);
  for (ContentId c : pool) heap.push({spec.marginal_gain(c, counts), c, 0});

  std::vector<bool> used(pool.size(), false);
  auto mark_used = [&](ContentId c) {
    used[static_cast<std::size_t>(std::lower_bound(pool.begin(), pool.end(), c) - pool.begin())] = true;
  };

  std::size_t step = 0;
  bool exhausted = false;
  while (result.chosen.size() < capacity && !heap.empty()) {
    Bound top = heap.top();
    heap.pop();
    if (top.step != step) {
      top.gain = spec.marginal_gain(top.id, counts);
      top.step = step;
      heap.push(top);
      continue;
    }
    if (!(top.gain > 0.0)) {
      exhausted = true;
      break;
    }
    result.chosen.push_back(top.id);
    result.zero_gain.push_back(false);
    mark_used(top.id);
    for (std::uint32_t s : spec.covering(top.id)) ++counts[s];
    result.trajectory.push_back(spec.objective_from_counts(counts));
    ++step;
  }

  if (exhausted) {
    const double value = spec.objective_from_counts(counts);
    for (std::size_t i = 0; i < pool.size() && result.chosen.size() < capacity; ++i) {
      if (used[i]) continue;
      result.chosen.push_back(pool[i]);
      result.zero_gain.push_back(true);
      result.trajectory.push_back(value);
    }
  }
  return result;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using wide = unsigned __int128;
  wide r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

PlacementResult exact_placement(const ObjectiveSpec& spec, std::size_t capacity,
                                std::span<const ContentId> candidates, std::uint64_t max_subsets) {
  if (capacity == 0) throw ParameterError("cache capacity must be positive");
  const std::vector<std::uint32_t> zeros(spec.support_size(), 0);
  std::vector<ContentId> useful;
  for (ContentId c : sorted_unique(candidates)) {
    if (spec.marginal_gain(c, zeros) > 0.0) useful.push_back(c);
  }

  PlacementResult result;
  result.method = PlacementMethod::kExact;
  const std::size_t k = std::min(capacity, useful.size());
  const auto subsets = binomial(useful.size(), k);
  if (subsets > max_subsets) {
    throw InstanceTooLargeError("exhaustive placement would enumerate " + std::to_string(subsets) +
                                " subsets (limit " + std::to_string(max_subsets) + ")");
  }

  std::vector<std::size_t> best;
  if (k == useful.size()) {
    for (std::size_t i = 0; i < k; ++i) best.push_back(i);
  } else {
    // Depth-first enumeration in lexicographic order; the first maximum wins.
    std::vector<std::uint32_t> counts(spec.support_size(), 0);
    std::vector<std::size_t> current;
    double best_value = -1.0;
    auto visit = [&](auto&& self, std::size_t from) -> void {
      if (current.size() == k) {
        const double value = spec.objective_from_counts(counts);
        if (value > best_value) {
          best_value = value;
          best = current;
        }
        return;
      }
      for (std::size_t i = from; i + (k - current.size()) <= useful.size(); ++i) {
        current.push_back(i);
        for (std::uint32_t s : spec.covering(useful[i])) ++counts[s];
        self(self, i + 1);
        for (std::uint32_t s : spec.covering(useful[i])) --counts[s];
        current.pop_back();
      }
    };
    visit(visit, 0);
  }

  std::vector<std::uint32_t> counts(spec.support_size(), 0);
  for (std::size_t i : best) {
    result.chosen.push_back(useful[i]);
    result.zero_gain.push_back(false);
    for (std::uint32_t s : spec.covering(useful[i])) ++counts[s];
    result.trajectory.push_back(spec.objective_from_counts(counts));
  }
  return result;
}

PlacementResult top_placement(const Catalog& catalog, std::size_t capacity) {
  if (capacity == 0) throw ParameterError("cache capacity must be positive");
  PlacementResult result;
  result.method = PlacementMethod::kTop;
  result.chosen = top_popular(catalog, capacity).ids;
  result.zero_gain.assign(result.chosen.size(), false);
  return result;
}

void annotate_trajectory(PlacementResult& result, const ObjectiveSpec& spec) {
  std::vector<std::uint32_t> counts(spec.support_size(), 0);
  result.trajectory.clear();
  for (ContentId c : result.chosen) {
    for (std::uint32_t s : spec.covering(c)) ++counts[s];
    result.trajectory.push_back(spec.objective_from_counts(counts));
  }
}

SubmodularityReport check_submodularity(const ObjectiveSpec& spec, std::size_t trials,
                                        std::uint64_t seed, double tolerance) {
  auto universe = spec.explored_union();
  universe.insert(universe.end(), spec.support().begin(), spec.support().end());
  universe = sorted_unique(universe);

  SubmodularityReport report;
  if (universe.empty()) return report;
  Rng rng(seed);
  std::vector<ContentId> a;
  std::vector<ContentId> b;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t xi = rng.uniform_index(universe.size());
    const ContentId x = universe[xi];
    const double keep_b = rng.uniform();
    const double keep_a = rng.uniform();
    a.clear();
    b.clear();
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (i == xi || rng.uniform() >= keep_b) continue;
      b.push_back(universe[i]);
      if (rng.uniform() < keep_a) a.push_back(universe[i]);
    }
    const double fa = spec.objective(a);
    const double fb = spec.objective(b);
    a.push_back(x);
    b.push_back(x);
    const double gain_a = spec.objective(a) - fa;
    const double gain_b = spec.objective(b) - fb;

    ++report.trials;
    if (fa > fb + tolerance) {
      ++report.monotonicity_violations;
      report.worst_violation = std::max(report.worst_violation, fa - fb);
    }
    if (gain_a < gain_b - tolerance) {
      ++report.submodularity_violations;
      report.worst_violation = std::max(report.worst_violation, gain_b - gain_a);
    }
  }
  return report;
}

}  // namespace cabaret
