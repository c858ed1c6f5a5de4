#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cabaret/content_graph.hpp"

namespace fixtures {

using Records = std::vector<std::pair<std::string, std::vector<std::string>>>;
using Weights = std::vector<std::pair<std::string, double>>;

inline std::shared_ptr<const cabaret::Catalog> catalog(const Records& records, const Weights& weights = {}) {
  cabaret::CatalogBuilder b;
  for (const auto& [id, rel] : records) b.add_record(id, rel);
  for (const auto& [id, w] : weights) b.set_popularity(id, w);
  return std::make_shared<const cabaret::Catalog>(std::move(b).build());
}

inline std::vector<cabaret::ContentId> ids(const cabaret::Catalog& c, const std::vector<std::string>& names) {
  std::vector<cabaret::ContentId> out;
  for (const auto& n : names) out.push_back(c.at(n));
  return out;
}

template <typename Range>
std::vector<std::string> names(const cabaret::Catalog& c, const Range& ids) {
  std::vector<std::string> out;
  for (cabaret::ContentId id : ids) out.emplace_back(c.name(id));
  return out;
}

inline std::shared_ptr<const cabaret::Catalog> fig2() {
  // Seed s, three children, each with three private grandchildren.
  Records r{{"s", {"a", "b", "c"}}};
  for (std::string p : {"a", "b", "c"}) {
    r.push_back({p, {p + "1", p + "2", p + "3"}});
  }
  return catalog(r);
}

}  // namespace fixtures

#include <fmt/format.h>

#include "cabaret/rng.hpp"

namespace fixtures {

// Random catalog of `size` contents named n00, n01, ... with related lists
// of length up to `max_len`.
inline std::shared_ptr<const cabaret::Catalog> random_catalog(cabaret::Rng& rng, std::size_t size,
                                                              std::size_t max_len) {
  auto name = [](std::size_t i) { return fmt::format("n{:02}", i); };
  Records r;
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < size; ++j) {
      if (j != i) others.push_back(j);
    }
    // Partial Fisher-Yates for a random ordered subset.
    const std::size_t len = rng.uniform_index(std::min(max_len, others.size()) + 1);
    std::vector<std::string> rel;
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t pick = k + rng.uniform_index(others.size() - k);
      std::swap(others[k], others[pick]);
      rel.push_back(name(others[k]));
    }
    r.push_back({name(i), rel});
  }
  Weights w;
  for (std::size_t i = 0; i < size; ++i) w.push_back({name(i), rng.uniform()});
  return catalog(r, w);
}

}  // namespace fixtures
