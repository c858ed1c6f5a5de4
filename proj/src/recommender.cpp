#include "cabaret/recommender.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "cabaret/error.hpp"

namespace cabaret {

CacheManifest::CacheManifest(std::vector<ContentId> ids, std::optional<std::size_t> capacity) {
  std::unordered_set<ContentId> seen;
  for (ContentId id : ids) {
    if (seen.insert(id).second) ordered_.push_back(id);
  }
  sorted_ = ordered_;
  std::sort(sorted_.begin(), sorted_.end());
  capacity_ = capacity.value_or(ordered_.size());
  if (ordered_.size() > capacity_) {
    throw ParameterError("cache holds " + std::to_string(ordered_.size()) +
                         " contents but capacity is " + std::to_string(capacity_));
  }
}

CacheManifest parse_cache_manifest(std::string_view text, const Catalog& catalog,
                                   std::vector<std::string>* unknown) {
  std::vector<ContentId> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    const auto name = std::string_view(line).substr(b, e - b + 1);
    if (auto id = catalog.find(name)) {
      ids.push_back(*id);
    } else if (unknown) {
      unknown->emplace_back(name);
    }
  }
  return CacheManifest(std::move(ids));
}

CacheManifest load_cache_manifest(const std::filesystem::path& path, const Catalog& catalog,
                                  std::vector<std::string>* unknown) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open cache file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cache_manifest(ss.str(), catalog, unknown);
}

std::string format_cache_manifest(const CacheManifest& cache, const Catalog& catalog) {
  std::string out;
  for (ContentId id : cache.ids()) {
    out += catalog.name(id);
    out += '\n';
  }
  return out;
}

std::size_t RecommendationList::cached_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.cached; }));
}

std::vector<ContentId> RecommendationList::ids() const {
  std::vector<ContentId> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

RecommendationList select_cache_aware(std::span<const ContentId> exploration, std::size_t count,
                                      const CacheManifest& cache) {
  if (count == 0) throw ParameterError("recommendation count must be positive");
  RecommendationList out;
  out.empty_exploration = exploration.empty();
  const std::size_t target = std::min(count, exploration.size());
  out.entries.reserve(target);

  // Positions already taken by the cached pass; the exploration list has no
  // duplicates, so a position-level mask is equivalent to "L minus R".
  std::vector<bool> taken(exploration.size(), false);
  for (std::size_t i = 0; i < exploration.size() && out.entries.size() < target; ++i) {
    if (cache.contains(exploration[i])) {
      out.entries.push_back({exploration[i], true});
      taken[i] = true;
    }
  }
  for (std::size_t i = 0; i < exploration.size() && out.entries.size() < target; ++i) {
    if (!taken[i]) out.entries.push_back({exploration[i], false});
  }
  return out;
}

RecommendationList recommend(ContentId v, std::size_t count, const CacheManifest& cache,
                             const BfsParams& params, const RelationOracle& oracle) {
  if (count == 0) throw ParameterError("recommendation count must be positive");
  const auto ids = bfs(v, params, oracle).ids();
  return select_cache_aware(ids, count, cache);
}

std::size_t count_cached_in(ContentId v, const CacheManifest& cache, const BfsParams& params,
                            const RelationOracle& oracle) {
  const auto list = bfs(v, params, oracle);
  return static_cast<std::size_t>(std::count_if(list.entries.begin(), list.entries.end(),
                                                [&](const auto& e) { return cache.contains(e.id); }));
}

RecommendationList baseline_provider_recommender(ContentId v, std::size_t count,
                                                 const CacheManifest& cache,
                                                 const RelationOracle& oracle) {
  if (count == 0) throw ParameterError("recommendation count must be positive");
  RecommendationList out;
  const auto list = oracle.related(v, count);
  out.empty_exploration = list.empty();
  out.entries.reserve(list.size());
  for (ContentId c : list) out.entries.push_back({c, cache.contains(c)});
  return out;
}

RecommendationList reordered_provider_recommender(ContentId v, std::size_t count,
                                                  const CacheManifest& cache,
                                                  const RelationOracle& oracle) {
  auto out = baseline_provider_recommender(v, count, cache, oracle);
  std::stable_partition(out.entries.begin(), out.entries.end(),
                        [](const auto& e) { return e.cached; });
  return out;
}

std::string_view to_string(RecommenderKind kind) {
  switch (kind) {
    case RecommenderKind::kBaseline:
      return "baseline";
    case RecommenderKind::kReordered:
      return "reordered";
    case RecommenderKind::kCabaret:
      return "cabaret";
  }
  return "?";
}

RecommenderKind parse_recommender_kind(std::string_view text) {
  if (text == "baseline") return RecommenderKind::kBaseline;
  if (text == "reordered") return RecommenderKind::kReordered;
  if (text == "cabaret") return RecommenderKind::kCabaret;
  throw ParameterError("unknown recommender '" + std::string(text) +
                       "' (expected baseline, reordered or cabaret)");
}

Recommender::Recommender(RecommenderKind kind, std::size_t count, BfsParams params,
                         std::shared_ptr<const CacheManifest> cache, const RelationOracle& oracle,
                         std::shared_ptr<const ExplorationTable> table)
    : kind_(kind),
      count_(count),
      params_(params),
      cache_(std::move(cache)),
      oracle_(&oracle),
      table_(std::move(table)) {
  if (count_ == 0) throw ParameterError("recommendation count must be positive");
  if (!cache_) cache_ = std::make_shared<const CacheManifest>();
  if (kind_ == RecommenderKind::kCabaret) params_.validate();
  if (table_ && !(table_->params() == params_)) {
    throw ParameterError("exploration table was built with different BFS parameters");
  }
}

RecommendationList Recommender::operator()(ContentId v) const {
  switch (kind_) {
    case RecommenderKind::kBaseline:
      return baseline_provider_recommender(v, count_, *cache_, *oracle_);
    case RecommenderKind::kReordered:
      return reordered_provider_recommender(v, count_, *cache_, *oracle_);
    case RecommenderKind::kCabaret:
      if (table_) return select_cache_aware(table_->at(v), count_, *cache_);
      return recommend(v, count_, *cache_, params_, *oracle_);
  }
  return {};
}

}  // namespace cabaret
