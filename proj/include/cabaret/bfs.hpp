#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cabaret/content_graph.hpp"

namespace cabaret {

/// Exploration depth and per-content query width.
struct BfsParams {
  std::size_t depth = 2;
  std::size_t width = 50;

  /// Throws ParameterError unless depth >= 1 and width >= 1.
  void validate() const;

  friend bool operator==(const BfsParams&, const BfsParams&) = default;
};

struct ExplorationEntry {
  ContentId id;
  std::uint32_t depth = 0;

  friend bool operator==(const ExplorationEntry&, const ExplorationEntry&) = default;
};

/// Ordered, duplicate-free list of contents directly and indirectly related
/// to `seed`, level by level. Never contains the seed.
struct ExplorationList {
  ContentId seed;
  std::vector<ExplorationEntry> entries;
  /// Oracle queries issued while exploring.
  std::size_t queries = 0;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  std::vector<ContentId> ids() const;
};

/// Level-order exploration with first-occurrence de-duplication. Level 1 is
/// related(v, width); every level entry is expanded exactly once until
/// `depth` is reached. Re-discovered contents are skipped and do not free up
/// width.
ExplorationList bfs(ContentId v, const BfsParams& params, const RelationOracle& oracle);

/// Contents grouped by the depth at which they were first discovered
/// (index 0 holds depth 1). Each group is sorted by ContentId.
std::vector<std::vector<ContentId>> depth_sets(ContentId v, const BfsParams& params,
                                               const RelationOracle& oracle);

/// bfs() for every catalog content, computed once and shared read-only.
class ExplorationTable {
 public:
  ExplorationTable(const RelationOracle& oracle, const BfsParams& params, std::size_t workers = 1);

  /// IDs of the exploration list of v, in list order.
  std::span<const ContentId> at(ContentId v) const;
  const BfsParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return offsets_.size() - 1; }

 private:
  BfsParams params_;
  std::vector<std::size_t> offsets_;
  std::vector<ContentId> ids_;
};

}  // namespace cabaret
