// Planted-community catalog generator.
//
// Contents are split into G communities arranged in a ring. Each related-list
// slot of a content in community g is filled from g itself with probability
// `mixing`, otherwise from community g+1. With mixing = 0 depth-1 and depth-2
// results live in different communities (overlap 0); with mixing = 1 lists
// stay inside one community and overlap approaches 1. The mixing value is
// found by bisection on the measured median overlap of the most popular
// contents. Every content's list comes from its own seeded stream, so lists
// can be generated independently and lazily during calibration.

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "cabaret/content_graph.hpp"
#include "cabaret/error.hpp"
#include "cabaret/rng.hpp"

namespace cabaret {
namespace {

constexpr int kBisectionSteps = 24;
constexpr int kDrawAttempts = 64;

std::vector<std::uint32_t> shuffled_range(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.uniform_index(i)]);
  return v;
}

class Planter {
 public:
  explicit Planter(const SyntheticParams& p) : p_(p) {
    const std::size_t v = p.size;
    length_ = std::min(p.related_length, v - 1);
    std::size_t s = p.community_size;
    if (s == 0) s = std::max<std::size_t>(1, std::min(4 * p.related_length, v / 2));
    s = std::min(s, v);
    groups_ = std::max<std::size_t>(1, v / s);

    Rng community_rng(derive_seed(p.seed, "communities"));
    const auto perm = shuffled_range(v, community_rng);
    members_.resize(groups_);
    group_of_.resize(v);
    for (std::size_t i = 0; i < v; ++i) {
      const std::size_t g = std::min(i / s, groups_ - 1);
      members_[g].push_back(perm[i]);
      group_of_[perm[i]] = static_cast<std::uint32_t>(g);
    }
    list_seed_ = derive_seed(p.seed, "lists");
  }

  std::size_t groups() const { return groups_; }

  std::vector<ContentId> list(std::uint32_t content, double mixing) const {
    Rng rng(derive_seed(list_seed_, std::uint64_t{content}));
    const auto& own = members_[group_of_[content]];
    const auto& next = members_[(group_of_[content] + 1) % groups_];
    std::vector<ContentId> out;
    out.reserve(length_);

    auto usable = [&](std::uint32_t c) {
      if (c == content) return false;
      return std::none_of(out.begin(), out.end(), [c](ContentId x) { return x.value() == c; });
    };
    auto draw_from = [&](const std::vector<std::uint32_t>& pool) -> bool {
      for (int a = 0; a < kDrawAttempts; ++a) {
        const auto c = pool[rng.uniform_index(pool.size())];
        if (usable(c)) {
          out.emplace_back(c);
          return true;
        }
      }
      return false;
    };

    while (out.size() < length_) {
      const bool inside = rng.uniform() < mixing;
      const auto& first = inside ? own : next;
      const auto& second = inside ? next : own;
      if (draw_from(first) || draw_from(second)) continue;
      // Both pools nearly exhausted: scan the catalog from a random start.
      const auto start = rng.uniform_index(p_.size);
      for (std::size_t i = 0; i < p_.size; ++i) {
        const auto c = static_cast<std::uint32_t>((start + i) % p_.size);
        if (usable(c)) {
          out.emplace_back(c);
          break;
        }
      }
    }
    return out;
  }

 private:
  const SyntheticParams& p_;
  std::size_t length_ = 0;
  std::size_t groups_ = 1;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<std::uint32_t> group_of_;
  std::uint64_t list_seed_ = 0;
};

std::vector<double> zipf_popularity(const SyntheticParams& p) {
  Rng rng(derive_seed(p.seed, "popularity"));
  const auto rank_order = shuffled_range(p.size, rng);
  std::vector<double> w(p.size);
  double total = 0.0;
  for (std::size_t r = 0; r < p.size; ++r) {
    const double x = std::pow(static_cast<double>(r + 1), -p.zipf_exponent);
    w[rank_order[r]] = x;
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

std::vector<std::string> padded_names(std::size_t n) {
  const auto digits = fmt::format("{}", n > 0 ? n - 1 : 0).size();
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = fmt::format("c{:0{}}", i, digits);
  return names;
}

// Median overlap of the seeds when lists are generated with `mixing`.
// Only the lists the measurement touches are generated.
double measured_median(const Planter& planter, const std::vector<ContentId>& seeds, double mixing) {
  std::unordered_map<std::uint32_t, std::vector<ContentId>> lists;
  auto get = [&](ContentId c) -> const std::vector<ContentId>& {
    auto it = lists.find(c.value());
    if (it == lists.end()) it = lists.emplace(c.value(), planter.list(c.value(), mixing)).first;
    return it->second;
  };
  std::vector<double> values;
  values.reserve(seeds.size());
  for (ContentId v : seeds) {
    const auto first = get(v);
    if (first.empty()) {
      values.push_back(0.0);
      continue;
    }
    std::unordered_set<ContentId> second;
    for (ContentId d : first) {
      const auto& l = get(d);
      second.insert(l.begin(), l.end());
    }
    const auto shared = std::count_if(first.begin(), first.end(),
                                      [&](ContentId c) { return second.contains(c); });
    values.push_back(static_cast<double>(shared) / static_cast<double>(first.size()));
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

Catalog generate_synthetic(const SyntheticParams& params, SyntheticCalibration* calibration) {
  if (params.related_length < 1) throw ParameterError("related-list length must be positive");
  if (params.size < params.related_length + 1) {
    throw ParameterError(fmt::format("catalog of {} contents cannot hold related lists of length {}",
                                     params.size, params.related_length));
  }
  if (!(params.overlap >= 0.0 && params.overlap <= 1.0)) {
    throw ParameterError("overlap target must be in [0, 1]");
  }
  if (!(params.zipf_exponent >= 0.0)) throw ParameterError("Zipf exponent must be non-negative");
  if (params.calibration_population < 1) throw ParameterError("calibration population must be positive");

  const Planter planter(params);
  auto popularity = zipf_popularity(params);

  // Most popular contents, ties by id, without building a Catalog first.
  std::vector<ContentId> seeds;
  {
    std::vector<std::uint32_t> order(params.size);
    for (std::size_t i = 0; i < params.size; ++i) order[i] = static_cast<std::uint32_t>(i);
    const std::size_t k = std::min(params.calibration_population, params.size);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                        if (popularity[a] != popularity[b]) return popularity[a] > popularity[b];
                        return a < b;
                      });
    for (std::size_t i = 0; i < k; ++i) seeds.emplace_back(order[i]);
  }

  const double target = params.overlap;
  const double bottom = measured_median(planter, seeds, 0.0);
  const double top = measured_median(planter, seeds, 1.0);
  double best = 0.0;
  double best_value = bottom;
  if (std::abs(top - target) < std::abs(bottom - target)) {
    best = 1.0;
    best_value = top;
  }
  if (bottom < target && target < top) {
    double lo = 0.0;
    double hi = 1.0;
    for (int step = 0; step < kBisectionSteps; ++step) {
      const double mid = 0.5 * (lo + hi);
      const double value = measured_median(planter, seeds, mid);
      if (std::abs(value - target) < std::abs(best_value - target)) {
        best = mid;
        best_value = value;
      }
      (value < target ? lo : hi) = mid;
    }
  }

  CatalogData data;
  data.names = padded_names(params.size);
  data.related.resize(params.size);
  for (std::size_t i = 0; i < params.size; ++i) {
    data.related[i] = planter.list(static_cast<std::uint32_t>(i), best);
  }
  data.popularity = std::move(popularity);
  data.defined.assign(params.size, true);

  if (calibration) {
    calibration->mixing = best;
    calibration->measured_median = best_value;
    calibration->communities = planter.groups();
  }
  return Catalog(std::move(data));
}

}  // namespace cabaret
