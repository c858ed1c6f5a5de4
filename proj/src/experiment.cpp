#include "cabaret/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "cabaret/error.hpp"
#include "cabaret/rng.hpp"

namespace cabaret {
namespace {

using TableKey = std::pair<std::size_t, std::size_t>;

BfsParams model_params(const ScenarioCell& cell, std::size_t count) {
  if (cell.recommender == RecommenderKind::kCabaret) return {cell.depth, cell.width};
  // The provider list is a depth-1 exploration of width N.
  return {1, count};
}

std::vector<ContentId> candidate_pool(const ExperimentConfig& config, const Catalog& catalog,
                                      const ObjectiveSpec& spec) {
  if (config.candidates == CandidateSet::kExplored) return spec.explored_union();
  std::vector<ContentId> all;
  all.reserve(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) all.emplace_back(static_cast<ContentId::value_type>(i));
  return all;
}

ResultRow evaluate_cell(const ScenarioCell& cell, const ExperimentConfig& config,
                        const RelationOracle& oracle, const PopularityRegion& front,
                        const std::map<TableKey, std::shared_ptr<const ExplorationTable>>& tables) {
  const Catalog& catalog = oracle.catalog();
  const auto dist = cell.demand.distribution(config.count);
  const ObjectiveSpec spec =
      ObjectiveSpec::front_page(front, config.count, dist, model_params(cell, config.count), oracle);

  PlacementResult placement;
  switch (cell.policy) {
    case PlacementMethod::kTop:
      placement = top_placement(catalog, cell.capacity);
      annotate_trajectory(placement, spec);
      break;
    case PlacementMethod::kGreedy:
      placement = greedy_placement(spec, cell.capacity, candidate_pool(config, catalog, spec));
      break;
    case PlacementMethod::kExact:
      placement = exact_placement(spec, cell.capacity, candidate_pool(config, catalog, spec));
      break;
  }
  auto cache = std::make_shared<const CacheManifest>(placement.chosen, cell.capacity);

  std::shared_ptr<const ExplorationTable> table;
  if (cell.recommender == RecommenderKind::kCabaret) table = tables.at({cell.depth, cell.width});
  const Recommender recommender(cell.recommender, config.count, {cell.depth, cell.width}, cache,
                                oracle, table);
  const RecommendFn fn = [&recommender](ContentId v) { return recommender(v); };

  ResultRow row;
  row.cell = cell;
  row.seed = derive_seed(config.seed, cell.key());
  row.objective = placement.value();
  if (!placement.chosen.empty()) {
    const auto on_front = std::count_if(placement.chosen.begin(), placement.chosen.end(), [&](ContentId c) {
      return std::find(front.ids.begin(), front.ids.end(), c) != front.ids.end();
    });
    row.cached_in_front_page =
        static_cast<double>(on_front) / static_cast<double>(placement.chosen.size());
  }

  row.evaluation = config.evaluation;
  if (row.evaluation == EvaluationMode::kAuto) {
    row.evaluation = cell.steps == 2 ? EvaluationMode::kExact : EvaluationMode::kSample;
  }
  if (row.evaluation == EvaluationMode::kExact) {
    const auto hits = enumerate_sequential(cell.steps, front, fn, dist, catalog.size());
    row.report = chr_from_expectation(hits);
  } else {
    std::vector<Session> sessions;
    sessions.reserve(config.sessions);
    for (std::size_t i = 0; i < config.sessions; ++i) {
      sessions.push_back(run_session(cell.steps, front, fn, *cache, dist, derive_seed(row.seed, i)));
    }
    row.report = chr_sequential(sessions);
  }
  return row;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
}

std::string num(double x) { return fmt::format("{}", x); }

std::string cell_columns(const ScenarioCell& c) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", c.index, to_string(c.recommender), c.depth, c.width,
                     c.count, to_string(c.policy), c.capacity, c.demand.label(), c.steps);
}

std::string cell_header() { return "cell,recommender,depth,width,N,cache_policy,capacity,demand,K"; }

std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string ScenarioCell::key() const {
  return fmt::format("recommender={};depth={};width={};policy={};capacity={};demand={};K={}",
                     to_string(recommender), depth, width, to_string(policy), capacity,
                     demand.label(), steps);
}

std::vector<ScenarioCell> expand_cells(const ExperimentConfig& config) {
  std::vector<ScenarioCell> cells;
  cells.reserve(config.cell_count());
  for (auto r : config.recommenders)
    for (auto d : config.depths)
      for (auto w : config.widths)
        for (auto p : config.policies)
          for (auto c : config.capacities)
            for (const auto& dm : config.demands)
              for (auto k : config.steps) {
                ScenarioCell cell{cells.size(), r, d, w, p, c, dm, k, config.count};
                cells.push_back(cell);
              }
  return cells;
}

std::shared_ptr<const Catalog> build_catalog(const CatalogSource& source,
                                             SyntheticCalibration* calibration) {
  if (source.synthetic) return std::make_shared<const Catalog>(generate_synthetic(*source.synthetic, calibration));
  return std::make_shared<const Catalog>(load_dataset(source.related_file, source.popularity_file));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  SyntheticCalibration calibration;
  auto catalog = build_catalog(config.catalog, &calibration);
  auto result = run_experiment(config, std::move(catalog));
  if (config.catalog.synthetic) result.calibration = calibration;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::shared_ptr<const Catalog> catalog) {
  const auto started = std::chrono::steady_clock::now();
  if (config.cell_count() == 0) throw ParameterError("config has an empty sweep");

  const RelationOracle oracle(catalog, config.width_cap);
  const auto front = top_popular(*catalog, config.front_page);
  const auto cells = expand_cells(config);

  std::map<TableKey, std::shared_ptr<const ExplorationTable>> tables;
  for (const auto& cell : cells) {
    if (cell.recommender != RecommenderKind::kCabaret) continue;
    const TableKey key{cell.depth, cell.width};
    if (!tables.contains(key)) {
      tables[key] = std::make_shared<const ExplorationTable>(oracle, BfsParams{cell.depth, cell.width},
                                                             config.workers);
    }
  }

  std::vector<std::optional<ResultRow>> rows(cells.size());
  std::vector<std::optional<std::string>> errors(cells.size());
  parallel_for(cells.size(), config.workers, [&](std::size_t i) {
    try {
      rows[i] = evaluate_cell(cells[i], config, oracle, front, tables);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  ExperimentResult result;
  result.catalog_size = catalog->size();
  result.max_steps = *std::max_element(config.steps.begin(), config.steps.end());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (rows[i]) {
      result.rows.push_back(std::move(*rows[i]));
    } else {
      result.failures.push_back({cells[i], errors[i].value_or("unknown error")});
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::string format_results_csv(const ExperimentResult& result) {
  std::string out = cell_header() +
                    ",evaluation,sessions,seed,chr,std_error,objective,cached_in_front_page,"
                    "truncated_sessions";
  for (std::size_t k = 2; k <= result.max_steps; ++k) out += fmt::format(",hit_k{}", k);
  out += '\n';
  for (const auto& row : result.rows) {
    const auto& r = row.report;
    out += cell_columns(row.cell);
    out += fmt::format(",{},{},{},{},{},{},{},{}", to_string(row.evaluation), r.sessions, row.seed,
                       num(r.chr), num(r.std_error), num(row.objective),
                       num(row.cached_in_front_page), r.truncated_sessions);
    for (std::size_t k = 2; k <= result.max_steps; ++k) {
      out += ',';
      if (k - 2 < r.step_rates.size()) out += num(r.step_rates[k - 2]);
    }
    out += '\n';
  }
  return out;
}

std::string format_failures_csv(const ExperimentResult& result) {
  std::string out = cell_header() + ",error\n";
  for (const auto& f : result.failures) {
    out += cell_columns(f.cell) + "," + quote(f.error) + "\n";
  }
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParameterError("no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size()) throw ParseError("CSV row width differs from header", 0);
      table.rows.push_back(std::move(record));
    }
    record.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n') {
      end_record();
    } else if (ch != '\r') {
      field.push_back(ch);
      any = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", 0);
  if (any || !field.empty()) end_record();
  return table;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quote(cells[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (out_dir / name).string());
    out << text;
  };
  write("results.csv", format_results_csv(result));
  write("failures.csv", format_failures_csv(result));
  write("config.json", config.source_text);

  nlohmann::ordered_json run;
  run["tool_version"] = std::string(kToolVersion);
  run["schema_version"] = std::string(kSchemaVersion);
  run["cells"] = config.cell_count();
  run["rows"] = result.rows.size();
  run["failures"] = result.failures.size();
  run["catalog_size"] = result.catalog_size;
  run["workers"] = config.workers;
  run["wall_seconds"] = result.wall_seconds;
  if (result.calibration) {
    run["calibration"] = {{"mixing", result.calibration->mixing},
                          {"measured_median_overlap", result.calibration->measured_median},
                          {"communities", result.calibration->communities}};
  }
  write("run.json", run.dump(2) + "\n");
}

}  // namespace cabaret
