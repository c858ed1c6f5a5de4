#include "cabaret/content_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "cabaret/error.hpp"

namespace cabaret {

Catalog::Catalog(CatalogData data) {
  const std::size_t n = data.names.size();
  if (n > std::numeric_limits<ContentId::value_type>::max()) {
    throw ParameterError("catalog too large");
  }
  if (data.related.size() != n || data.popularity.size() != n || data.defined.size() != n) {
    throw ParameterError("catalog data arrays differ in length");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(data.names[i - 1] < data.names[i])) {
      throw ParameterError("catalog names must be sorted and unique: '" + data.names[i] + "'");
    }
  }

  offsets_.reserve(n + 1);
  offsets_.push_back(0);
  std::unordered_set<ContentId> seen;
  for (std::size_t i = 0; i < n; ++i) {
    seen.clear();
    for (ContentId r : data.related[i]) {
      if (r.value() >= n) throw ParameterError("related entry outside catalog");
      if (r.value() == i) throw ParameterError("related list of '" + data.names[i] + "' contains itself");
      if (!seen.insert(r).second) {
        throw ParameterError("related list of '" + data.names[i] + "' repeats '" +
                             data.names[r.value()] + "'");
      }
      edges_.push_back(r);
    }
    offsets_.push_back(static_cast<std::uint32_t>(edges_.size()));
    const double w = data.popularity[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("popularity of '" + data.names[i] + "' must be finite and non-negative");
    }
  }
  names_ = std::move(data.names);
  popularity_ = std::move(data.popularity);
  defined_ = std::move(data.defined);
}

void Catalog::check(ContentId id) const {
  if (!contains(id)) throw CatalogMissError("content #" + std::to_string(id.value()) + " not in catalog");
}

std::string_view Catalog::name(ContentId id) const {
  check(id);
  return names_[id.value()];
}

std::optional<ContentId> Catalog::find(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == names_.end() || *it != name) return std::nullopt;
  return ContentId(static_cast<ContentId::value_type>(it - names_.begin()));
}

ContentId Catalog::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw CatalogMissError("unknown content id '" + std::string(name) + "'");
}

std::span<const ContentId> Catalog::related(ContentId id) const {
  check(id);
  return std::span<const ContentId>(edges_).subspan(offsets_[id.value()],
                                                    offsets_[id.value() + 1] - offsets_[id.value()]);
}

double Catalog::popularity(ContentId id) const {
  check(id);
  return popularity_[id.value()];
}

bool Catalog::defined(ContentId id) const {
  check(id);
  return defined_[id.value()];
}

void CatalogBuilder::add_record(std::string id, std::vector<std::string> related) {
  std::unordered_set<std::string_view> seen;
  for (const auto& r : related) {
    if (r == id) throw ParameterError("related list of '" + id + "' contains itself");
    if (!seen.insert(r).second) throw ParameterError("related list of '" + id + "' repeats '" + r + "'");
  }
  if (!defined_ids_.insert(id).second) {
    throw DuplicateDefinitionError("duplicate definition of '" + id + "'", 0);
  }
  records_.push_back({std::move(id), std::move(related)});
}

void CatalogBuilder::set_popularity(std::string id, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw ParameterError("popularity of '" + id + "' must be finite and non-negative");
  }
  if (!weighted_ids_.insert(id).second) {
    throw DuplicateDefinitionError("duplicate popularity for '" + id + "'", 0);
  }
  weights_.emplace_back(std::move(id), weight);
}

Catalog CatalogBuilder::build() && {
  std::vector<std::string> names;
  for (const auto& rec : records_) {
    names.push_back(rec.id);
    names.insert(names.end(), rec.related.begin(), rec.related.end());
  }
  for (const auto& [id, w] : weights_) names.push_back(id);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  auto index_of = [&names](const std::string& s) {
    auto it = std::lower_bound(names.begin(), names.end(), s);
    return ContentId(static_cast<ContentId::value_type>(it - names.begin()));
  };

  CatalogData data;
  data.related.resize(names.size());
  data.popularity.assign(names.size(), 0.0);
  data.defined.assign(names.size(), false);
  for (auto& rec : records_) {
    const auto id = index_of(rec.id);
    auto& list = data.related[id.value()];
    list.reserve(rec.related.size());
    for (const auto& r : rec.related) list.push_back(index_of(r));
    data.defined[id.value()] = true;
  }
  for (const auto& [id, w] : weights_) data.popularity[index_of(id).value()] = w;
  data.names = std::move(names);
  return Catalog(std::move(data));
}

RelationOracle::RelationOracle(std::shared_ptr<const Catalog> catalog, std::size_t width_cap)
    : catalog_(std::move(catalog)), width_cap_(width_cap) {
  if (!catalog_) throw ParameterError("relation oracle needs a catalog");
  if (width_cap_ == 0) throw ParameterError("width cap must be positive");
}

std::span<const ContentId> RelationOracle::related(ContentId v, std::size_t width) const {
  if (width == 0) throw ParameterError("related() width must be positive");
  auto list = catalog_->related(v);
  return list.first(std::min({width, width_cap_, list.size()}));
}

PopularityRegion top_popular(const Catalog& catalog, std::size_t count) {
  if (count == 0) throw ParameterError("popular region size must be positive");
  PopularityRegion region;
  region.truncated = count > catalog.size();
  count = std::min(count, catalog.size());

  std::vector<ContentId> order;
  order.reserve(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    order.emplace_back(static_cast<ContentId::value_type>(i));
  }
  auto heavier = [&catalog](ContentId a, ContentId b) {
    const double wa = catalog.popularity(a);
    const double wb = catalog.popularity(b);
    if (wa != wb) return wa > wb;
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    heavier);
  order.resize(count);
  region.ids = std::move(order);
  return region;
}

}  // namespace cabaret
