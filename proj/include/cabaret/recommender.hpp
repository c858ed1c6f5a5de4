#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cabaret/bfs.hpp"
#include "cabaret/content_graph.hpp"

namespace cabaret {

/// Set of cached contents with a capacity bound. Keeps the order the IDs were
/// given in for reporting.
class CacheManifest {
 public:
  CacheManifest() = default;
  /// Duplicates are dropped. Capacity defaults to the number of distinct IDs;
  /// more IDs than `capacity` is a ParameterError.
  explicit CacheManifest(std::vector<ContentId> ids,
                         std::optional<std::size_t> capacity = std::nullopt);

  bool contains(ContentId id) const noexcept {
    return std::binary_search(sorted_.begin(), sorted_.end(), id);
  }
  std::size_t size() const noexcept { return ordered_.size(); }
  bool empty() const noexcept { return ordered_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  /// IDs in the order they were supplied.
  std::span<const ContentId> ids() const noexcept { return ordered_; }

 private:
  std::vector<ContentId> ordered_;
  std::vector<ContentId> sorted_;
  std::size_t capacity_ = 0;
};

/// Reads one ID per line. Blank lines and lines starting with '#' are
/// skipped; IDs not in `catalog` are skipped and reported in `unknown`.
CacheManifest load_cache_manifest(const std::filesystem::path& path, const Catalog& catalog,
                                  std::vector<std::string>* unknown = nullptr);
CacheManifest parse_cache_manifest(std::string_view text, const Catalog& catalog,
                                   std::vector<std::string>* unknown = nullptr);
std::string format_cache_manifest(const CacheManifest& cache, const Catalog& catalog);

struct RecommendationEntry {
  ContentId id;
  bool cached = false;

  friend bool operator==(const RecommendationEntry&, const RecommendationEntry&) = default;
};

/// Ordered recommendations; cached entries form a prefix for CABaRet.
struct RecommendationList {
  std::vector<RecommendationEntry> entries;
  /// Set when there was nothing to recommend.
  bool empty_exploration = false;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  std::size_t cached_count() const noexcept;
  std::vector<ContentId> ids() const;
};

/// Cache-aware selection over an exploration list: first the cached members
/// in list order, then the remaining members from the head of the list,
/// until `count` items are chosen or the list runs out.
RecommendationList select_cache_aware(std::span<const ContentId> exploration, std::size_t count,
                                      const CacheManifest& cache);

/// CABaRet: bfs(v) followed by select_cache_aware().
RecommendationList recommend(ContentId v, std::size_t count, const CacheManifest& cache,
                             const BfsParams& params, const RelationOracle& oracle);

/// |cache ∩ set(bfs(v))|, without the cap at the list length.
std::size_t count_cached_in(ContentId v, const CacheManifest& cache, const BfsParams& params,
                            const RelationOracle& oracle);

/// The provider's own list: first `count` of related(v, count), flags only.
RecommendationList baseline_provider_recommender(ContentId v, std::size_t count,
                                                 const CacheManifest& cache,
                                                 const RelationOracle& oracle);

/// The provider's list with its cached entries moved to the front, relative
/// order otherwise kept.
RecommendationList reordered_provider_recommender(ContentId v, std::size_t count,
                                                  const CacheManifest& cache,
                                                  const RelationOracle& oracle);

enum class RecommenderKind { kBaseline, kReordered, kCabaret };

std::string_view to_string(RecommenderKind kind);
RecommenderKind parse_recommender_kind(std::string_view text);

/// One recommender bound to its cache and parameters. When a matching
/// ExplorationTable is supplied, CABaRet reads exploration lists from it
/// instead of re-running the BFS.
class Recommender {
 public:
  Recommender(RecommenderKind kind, std::size_t count, BfsParams params,
              std::shared_ptr<const CacheManifest> cache, const RelationOracle& oracle,
              std::shared_ptr<const ExplorationTable> table = nullptr);

  RecommendationList operator()(ContentId v) const;

  RecommenderKind kind() const noexcept { return kind_; }
  std::size_t count() const noexcept { return count_; }
  const BfsParams& params() const noexcept { return params_; }
  const CacheManifest& cache() const noexcept { return *cache_; }

 private:
  RecommenderKind kind_;
  std::size_t count_;
  BfsParams params_;
  std::shared_ptr<const CacheManifest> cache_;
  const RelationOracle* oracle_;
  std::shared_ptr<const ExplorationTable> table_;
};

}  // namespace cabaret
