#include "cabaret/bfs.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_set>

#include "cabaret/error.hpp"

namespace cabaret {

void BfsParams::validate() const {
  if (depth < 1) throw ParameterError("BFS depth must be at least 1");
  if (width < 1) throw ParameterError("BFS width must be at least 1");
}

std::vector<ContentId> ExplorationList::ids() const {
  std::vector<ContentId> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

ExplorationList bfs(ContentId v, const BfsParams& params, const RelationOracle& oracle) {
  params.validate();
  ExplorationList out;
  out.seed = v;

  std::unordered_set<ContentId> seen;
  seen.insert(v);

  auto expand = [&](ContentId c, std::uint32_t level) {
    ++out.queries;
    for (ContentId r : oracle.related(c, params.width)) {
      if (seen.insert(r).second) out.entries.push_back({r, level});
    }
  };

  expand(v, 1);
  std::size_t level_begin = 0;
  for (std::uint32_t level = 2; level <= params.depth; ++level) {
    const std::size_t level_end = out.entries.size();
    if (level_begin == level_end) break;
    for (std::size_t i = level_begin; i < level_end; ++i) expand(out.entries[i].id, level);
    level_begin = level_end;
  }
  return out;
}

std::vector<std::vector<ContentId>> depth_sets(ContentId v, const BfsParams& params,
                                               const RelationOracle& oracle) {
  const auto list = bfs(v, params, oracle);
  std::vector<std::vector<ContentId>> sets(params.depth);
  for (const auto& e : list.entries) sets[e.depth - 1].push_back(e.id);
  for (auto& s : sets) std::sort(s.begin(), s.end());
  return sets;
}

ExplorationTable::ExplorationTable(const RelationOracle& oracle, const BfsParams& params,
                                   std::size_t workers)
    : params_(params) {
  params_.validate();
  const std::size_t n = oracle.catalog().size();
  std::vector<std::vector<ContentId>> lists(n);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      lists[i] = bfs(ContentId(static_cast<ContentId::value_type>(i)), params_, oracle).ids();
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, n / 64));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  offsets_.reserve(n + 1);
  offsets_.push_back(0);
  for (const auto& l : lists) {
    ids_.insert(ids_.end(), l.begin(), l.end());
    offsets_.push_back(ids_.size());
  }
}

std::span<const ContentId> ExplorationTable::at(ContentId v) const {
  if (v.value() + 1 >= offsets_.size()) {
    throw CatalogMissError("content #" + std::to_string(v.value()) + " not in exploration table");
  }
  return std::span<const ContentId>(ids_).subspan(offsets_[v.value()],
                                                  offsets_[v.value() + 1] - offsets_[v.value()]);
}

}  // namespace cabaret
