#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cabaret/cache_policy.hpp"
#include "cabaret/content_graph.hpp"
#include "cabaret/demand.hpp"
#include "cabaret/metrics.hpp"
#include "cabaret/recommender.hpp"

namespace cabaret {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kSchemaVersion = "1";

/// How a scenario cell obtains its hit ratio. kAuto enumerates K = 2 cells
/// exactly and samples sessions otherwise.
enum class EvaluationMode { kAuto, kExact, kSample };

std::string_view to_string(EvaluationMode mode);
EvaluationMode parse_evaluation_mode(std::string_view text);

/// Where greedy/exact placement looks for contents to cache.
enum class CandidateSet { kExplored, kCatalog };

struct CatalogSource {
  std::optional<SyntheticParams> synthetic;
  std::filesystem::path related_file;
  std::optional<std::filesystem::path> popularity_file;
};

/// A declarative sweep. Every vector is one sweep dimension; the scenario
/// cells are their Cartesian product.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  CatalogSource catalog;
  std::size_t width_cap = RelationOracle::kDefaultWidthCap;
  std::size_t front_page = 50;
  std::size_t count = 20;
  std::vector<RecommenderKind> recommenders;
  std::vector<std::size_t> depths;
  std::vector<std::size_t> widths;
  std::vector<PlacementMethod> policies;
  std::vector<std::size_t> capacities;
  std::vector<DemandSpec> demands;
  std::vector<std::size_t> steps;
  std::size_t sessions = 1000;
  EvaluationMode evaluation = EvaluationMode::kAuto;
  CandidateSet candidates = CandidateSet::kExplored;
  std::size_t workers = 1;
  /// Original config text, echoed into the output directory.
  std::string source_text;

  std::size_t cell_count() const;
};

/// Parses the JSON config format. Relative file paths are resolved against
/// `base_dir`. Throws ParameterError on unknown keys, missing seed, empty
/// sweeps or missing files.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct ScenarioCell {
  std::size_t index = 0;
  RecommenderKind recommender = RecommenderKind::kCabaret;
  std::size_t depth = 2;
  std::size_t width = 50;
  PlacementMethod policy = PlacementMethod::kTop;
  std::size_t capacity = 1;
  DemandSpec demand;
  std::size_t steps = 2;
  /// Recommendation list length (not swept).
  std::size_t count = 20;

  /// Stable textual key of the cell coordinates; seeds derive from it.
  std::string key() const;
};

/// Cells in row-major order of (recommender, depth, width, policy, capacity,
/// demand, K).
std::vector<ScenarioCell> expand_cells(const ExperimentConfig& config);

struct ResultRow {
  ScenarioCell cell;
  EvaluationMode evaluation = EvaluationMode::kExact;
  std::uint64_t seed = 0;
  ChrReport report;
  /// Objective value of the placement under the cell's recommender model.
  double objective = 0.0;
  /// Fraction of cached contents that are on the front page.
  double cached_in_front_page = 0.0;
};

struct CellFailure {
  ScenarioCell cell;
  std::string error;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<CellFailure> failures;
  std::size_t max_steps = 2;
  double wall_seconds = 0.0;
  std::size_t catalog_size = 0;
  std::optional<SyntheticCalibration> calibration;
};

/// Builds the catalog, then evaluates every cell on up to config.workers
/// threads. A failing cell is recorded and does not stop the others. Results
/// do not depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Same, over an already built catalog.
ExperimentResult run_experiment(const ExperimentConfig& config, std::shared_ptr<const Catalog> catalog);

std::shared_ptr<const Catalog> build_catalog(const CatalogSource& source,
                                             SyntheticCalibration* calibration = nullptr);

std::string format_results_csv(const ExperimentResult& result);
std::string format_failures_csv(const ExperimentResult& result);

/// Plain CSV table (header plus string cells), for reading results back.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};
CsvTable parse_csv(std::string_view text);
std::string format_csv(const CsvTable& table);

/// Writes results.csv, failures.csv, config.json and run.json into `out_dir`.
void write_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::filesystem::path& out_dir);

}  // namespace cabaret
