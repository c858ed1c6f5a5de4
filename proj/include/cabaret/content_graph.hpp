#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace cabaret {

/// Dense handle for a catalog item. Handles are assigned in lexicographic
/// order of the item names, so comparing two handles of the same catalog is
/// the same as comparing their names. All tie-breaks in the library rely on
/// this.
class ContentId {
 public:
  using value_type = std::uint32_t;

  constexpr ContentId() = default;
  constexpr explicit ContentId(value_type value) : value_(value) {}

  constexpr value_type value() const noexcept { return value_; }

  friend constexpr auto operator<=>(ContentId, ContentId) = default;

 private:
  value_type value_ = 0;
};

/// Raw catalog contents, indexed by ContentId value. `names` must be sorted
/// and unique.
struct CatalogData {
  std::vector<std::string> names;
  std::vector<std::vector<ContentId>> related;
  std::vector<double> popularity;
  /// false for leaf contents that were only referenced, never defined.
  std::vector<bool> defined;
};

/// Immutable content catalog: names, ordered related lists and popularity
/// weights. Safe for concurrent reads.
class Catalog {
 public:
  /// Validates every invariant of `data` and throws ParameterError on failure.
  explicit Catalog(CatalogData data);

  std::size_t size() const noexcept { return names_.size(); }
  bool contains(ContentId id) const noexcept { return id.value() < names_.size(); }

  std::string_view name(ContentId id) const;
  std::optional<ContentId> find(std::string_view name) const;
  /// Like find(), but throws CatalogMissError.
  ContentId at(std::string_view name) const;

  /// Full stored related list, provider order.
  std::span<const ContentId> related(ContentId id) const;
  double popularity(ContentId id) const;
  bool defined(ContentId id) const;

  std::span<const std::string> names() const noexcept { return names_; }

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  void check(ContentId id) const;

  std::vector<std::string> names_;
  std::vector<std::uint32_t> offsets_;
  std::vector<ContentId> edges_;
  std::vector<double> popularity_;
  std::vector<bool> defined_;
};

/// Accumulates string-keyed records and produces a Catalog. Referenced but
/// undefined names become leaf contents with empty related lists.
class CatalogBuilder {
 public:
  /// Throws DuplicateDefinitionError if `id` was already defined, and
  /// ParameterError if `related` contains `id` itself or a repeated entry.
  void add_record(std::string id, std::vector<std::string> related);

  /// Throws DuplicateDefinitionError on a second weight for the same id and
  /// ParameterError on a negative or non-finite weight.
  void set_popularity(std::string id, double weight);

  Catalog build() &&;

 private:
  struct Record {
    std::string id;
    std::vector<std::string> related;
  };
  std::vector<Record> records_;
  std::vector<std::pair<std::string, double>> weights_;
  std::unordered_set<std::string> defined_ids_;
  std::unordered_set<std::string> weighted_ids_;
};

/// Provider-side "related items" surface over a catalog, with a per-query
/// width cap (the provider API returns at most 50 related items).
class RelationOracle {
 public:
  static constexpr std::size_t kDefaultWidthCap = 50;

  explicit RelationOracle(std::shared_ptr<const Catalog> catalog,
                          std::size_t width_cap = kDefaultWidthCap);

  /// First min(width, width_cap, list length) entries of v's related list.
  /// Throws CatalogMissError for an unknown v and ParameterError for width 0.
  std::span<const ContentId> related(ContentId v, std::size_t width) const;

  const Catalog& catalog() const noexcept { return *catalog_; }
  const std::shared_ptr<const Catalog>& catalog_ptr() const noexcept { return catalog_; }
  std::size_t width_cap() const noexcept { return width_cap_; }

 private:
  std::shared_ptr<const Catalog> catalog_;
  std::size_t width_cap_;
};

/// A region's most popular contents, highest weight first.
struct PopularityRegion {
  std::vector<ContentId> ids;
  /// Set when more contents were requested than the catalog holds.
  bool truncated = false;
};

/// The `count` highest-weight contents, ties broken by ContentId.
/// count == 0 is a ParameterError; count > size() is truncated and flagged.
PopularityRegion top_popular(const Catalog& catalog, std::size_t count);

/// Related-lists file (JSON lines) plus optional popularity CSV.
Catalog load_dataset(const std::filesystem::path& related_file,
                     const std::optional<std::filesystem::path>& popularity_file = std::nullopt);
Catalog load_dataset_from_strings(std::string_view related_text,
                                  std::optional<std::string_view> popularity_text = std::nullopt);

/// Canonical forms: records sorted by id, related arrays verbatim; leaf
/// contents are not written as related records. The popularity CSV lists
/// every content.
std::string canonical_related_lines(const Catalog& catalog);
std::string canonical_popularity_csv(const Catalog& catalog);
void save_dataset(const Catalog& catalog, const std::filesystem::path& related_file,
                  const std::optional<std::filesystem::path>& popularity_file = std::nullopt);

struct SyntheticParams {
  std::size_t size = 1000;
  std::size_t related_length = 50;
  /// Target median depth-1/depth-2 overlap of the most popular contents.
  double overlap = 0.9;
  std::uint64_t seed = 0;
  /// Community size; 0 picks 4 * related_length (at most size / 2).
  std::size_t community_size = 0;
  double zipf_exponent = 1.0;
  /// Number of most-popular contents the overlap target is measured on.
  std::size_t calibration_population = 50;
};

/// Outcome of the overlap calibration, for diagnostics.
struct SyntheticCalibration {
  double mixing = 0.0;
  double measured_median = 0.0;
  std::size_t communities = 0;
};

/// Planted-community synthetic catalog. Pure function of `params`.
Catalog generate_synthetic(const SyntheticParams& params,
                           SyntheticCalibration* calibration = nullptr);

}  // namespace cabaret

template <>
struct std::hash<cabaret::ContentId> {
  std::size_t operator()(cabaret::ContentId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value());
  }
};
