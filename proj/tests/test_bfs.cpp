#include <algorithm>
#include <deque>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"

#include "cabaret/bfs.hpp"
#include "cabaret/error.hpp"

using namespace cabaret;

namespace {

// Straightforward queue-based reference used as an oracle.
std::vector<ContentId> reference_bfs(ContentId v, std::size_t depth, std::size_t width,
                                     const RelationOracle& oracle) {
  std::vector<ContentId> out;
  std::set<ContentId> seen{v};
  std::vector<ContentId> level{v};
  for (std::size_t d = 1; d <= depth; ++d) {
    std::vector<ContentId> next;
    for (ContentId c : level) {
      for (ContentId r : oracle.related(c, width)) {
        if (seen.insert(r).second) next.push_back(r);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("depth one is the related list") {
  auto cat = fixtures::fig2();
  RelationOracle oracle(cat);
  const auto s = cat->at("s");
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto list = bfs(s, {1, k}, oracle);
    const auto rel = oracle.related(s, k);
    CHECK(list.ids() == std::vector<ContentId>(rel.begin(), rel.end()));
    CHECK(list.queries == 1);
  }
}

TEST_CASE("two-level tree with three children each") {
  auto cat = fixtures::fig2();
  RelationOracle oracle(cat);
  const auto list = bfs(cat->at("s"), {2, 3}, oracle);
  CHECK(list.size() == 12);
  CHECK(fixtures::names(*cat, list.ids()) ==
        std::vector<std::string>{"a", "b", "c", "a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3"});
  for (std::size_t i = 0; i < list.size(); ++i) CHECK(list.entries[i].depth == (i < 3 ? 1u : 2u));
  CHECK(list.queries == 4);

  const auto sets = depth_sets(cat->at("s"), {2, 3}, oracle);
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].size() == 3);
  CHECK(sets[1].size() == 9);
}

TEST_CASE("a cycle skips the seed on rediscovery") {
  auto cat = fixtures::catalog({{"a", {"b"}}, {"b", {"c"}}, {"c", {"a"}}});
  RelationOracle oracle(cat);
  const auto list = bfs(cat->at("a"), {3, 1}, oracle);
  CHECK(fixtures::names(*cat, list.ids()) == std::vector<std::string>{"b", "c"});
  CHECK(list.entries[0].depth == 1);
  CHECK(list.entries[1].depth == 2);
}

TEST_CASE("rediscovered entries do not free up width") {
  // s -> a, b; a -> b, c. With width 2, a's query returns [b, c]; b is a repeat.
  auto cat = fixtures::catalog({{"s", {"a", "b"}}, {"a", {"b", "c", "d"}}, {"b", {"s", "e"}}});
  RelationOracle oracle(cat);
  const auto list = bfs(cat->at("s"), {2, 2}, oracle);
  CHECK(fixtures::names(*cat, list.ids()) == std::vector<std::string>{"a", "b", "c", "e"});
}

TEST_CASE("bfs matches the reference on synthetic catalogs") {
  auto cat = std::make_shared<const Catalog>(
      generate_synthetic({.size = 400, .related_length = 12, .overlap = 0.6, .seed = 5}));
  RelationOracle oracle(cat);
  for (std::uint32_t i = 0; i < cat->size(); i += 13) {
    const ContentId v(i);
    for (std::size_t d : {1, 2, 3}) {
      for (std::size_t w : {1, 4, 12}) {
        const auto list = bfs(v, {d, w}, oracle);
        CHECK(list.ids() == reference_bfs(v, d, w, oracle));

        // Depth annotations never decrease, the seed never appears.
        for (std::size_t k = 1; k < list.size(); ++k) CHECK(list.entries[k - 1].depth <= list.entries[k].depth);
        const auto ids = list.ids();
        CHECK(std::find(ids.begin(), ids.end(), v) == ids.end());

        // Size bound and query bound.
        std::size_t bound = 0, pow = 1;
        for (std::size_t k = 1; k <= d; ++k) bound += (pow *= w);
        CHECK(list.size() <= bound);
        std::size_t upper_levels = 0;
        for (const auto& e : list.entries) upper_levels += e.depth < d;
        CHECK(list.queries <= 1 + upper_levels);

        // Depth-1 entries are the related list in order.
        std::vector<ContentId> first;
        for (const auto& e : list.entries) {
          if (e.depth == 1) first.push_back(e.id);
        }
        const auto rel = oracle.related(v, w);
        CHECK(first == std::vector<ContentId>(rel.begin(), rel.end()));
      }
    }
  }
}

TEST_CASE("exploration grows with width and depth") {
  auto cat = std::make_shared<const Catalog>(
      generate_synthetic({.size = 400, .related_length = 12, .overlap = 0.6, .seed = 9}));
  RelationOracle oracle(cat);
  auto as_set = [](const ExplorationList& l) {
    auto ids = l.ids();
    return std::set<ContentId>(ids.begin(), ids.end());
  };
  auto subset = [](const std::set<ContentId>& a, const std::set<ContentId>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (std::uint32_t i = 0; i < cat->size(); i += 17) {
    const ContentId v(i);
    for (std::size_t d = 1; d <= 3; ++d) {
      for (std::size_t w = 1; w < 12; ++w) {
        CHECK(subset(as_set(bfs(v, {d, w}, oracle)), as_set(bfs(v, {d, w + 1}, oracle))));
        CHECK(subset(as_set(bfs(v, {d, w}, oracle)), as_set(bfs(v, {d + 1, w}, oracle))));
      }
    }
  }
}

TEST_CASE("depth sets partition the exploration") {
  auto cat = std::make_shared<const Catalog>(
      generate_synthetic({.size = 300, .related_length = 8, .overlap = 0.8, .seed = 2}));
  RelationOracle oracle(cat);
  for (std::uint32_t i = 0; i < cat->size(); i += 11) {
    const ContentId v(i);
    const auto sets = depth_sets(v, {3, 8}, oracle);
    std::vector<ContentId> all;
    for (const auto& s : sets) {
      CHECK(std::is_sorted(s.begin(), s.end()));
      all.insert(all.end(), s.begin(), s.end());
    }
    std::sort(all.begin(), all.end());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    auto ids = bfs(v, {3, 8}, oracle).ids();
    std::sort(ids.begin(), ids.end());
    CHECK(all == ids);

    const auto one = depth_sets(v, {1, 8}, oracle);
    REQUIRE(one.size() == 1);
    auto rel = std::vector<ContentId>(oracle.related(v, 8).begin(), oracle.related(v, 8).end());
    std::sort(rel.begin(), rel.end());
    CHECK(one[0] == rel);
  }
}

TEST_CASE("exploration table matches direct bfs for any worker count") {
  auto cat = std::make_shared<const Catalog>(
      generate_synthetic({.size = 250, .related_length = 10, .overlap = 0.7, .seed = 4}));
  RelationOracle oracle(cat);
  const ExplorationTable one(oracle, {2, 6}, 1);
  const ExplorationTable four(oracle, {2, 6}, 4);
  REQUIRE(one.size() == cat->size());
  for (std::uint32_t i = 0; i < cat->size(); ++i) {
    const ContentId v(i);
    const auto direct = bfs(v, {2, 6}, oracle).ids();
    CHECK(std::vector<ContentId>(one.at(v).begin(), one.at(v).end()) == direct);
    CHECK(std::vector<ContentId>(four.at(v).begin(), four.at(v).end()) == direct);
  }
}

TEST_CASE("bfs parameter errors") {
  auto cat = fixtures::fig2();
  RelationOracle oracle(cat);
  CHECK_THROWS_AS(bfs(cat->at("s"), {0, 3}, oracle), ParameterError);
  CHECK_THROWS_AS(bfs(cat->at("s"), {2, 0}, oracle), ParameterError);
  CHECK_THROWS_AS(bfs(ContentId(1000), {2, 3}, oracle), CatalogMissError);
}
