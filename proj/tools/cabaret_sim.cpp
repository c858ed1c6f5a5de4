// cabaret-sim: command line front end for the simulator.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cabaret/bfs.hpp"
#include "cabaret/cache_policy.hpp"
#include "cabaret/error.hpp"
#include "cabaret/experiment.hpp"
#include "cabaret/metrics.hpp"
#include "cabaret/recommender.hpp"

using namespace cabaret;

namespace {

struct DatasetOptions {
  std::string related_file;
  std::string popularity_file;
  std::size_t w_max = RelationOracle::kDefaultWidthCap;

  void add_to(CLI::App& app) {
    app.add_option("--related-file", related_file, "Related-lists file (JSON lines)")->required()->check(CLI::ExistingFile);
    app.add_option("--popularity-file", popularity_file, "Popularity CSV (id,weight)")->check(CLI::ExistingFile);
    app.add_option("--w-max", w_max, "Per-query width cap of the relation oracle")->check(CLI::PositiveNumber);
  }

  RelationOracle open() const {
    std::optional<std::filesystem::path> pop;
    if (!popularity_file.empty()) pop = popularity_file;
    return RelationOracle(std::make_shared<const Catalog>(load_dataset(related_file, pop)), w_max);
  }
};

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-aware recommendation simulator"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", fmt::format("cabaret-sim {} (results schema {})", kToolVersion, kSchemaVersion));

  // run
  auto* run = app.add_subcommand("run", "Run an experiment config");
  std::string config_path, out_dir;
  std::size_t workers = 0;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic catalog");
  SyntheticParams sp;
  std::string gen_related, gen_popularity;
  gen->add_option("--size", sp.size, "Number of contents")->capture_default_str();
  gen->add_option("--related-length", sp.related_length, "Related-list length")->capture_default_str();
  gen->add_option("--overlap", sp.overlap, "Target median I(v) of the most popular contents")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", sp.seed, "Generator seed")->required();
  gen->add_option("--community-size", sp.community_size, "Community size (0 = automatic)");
  gen->add_option("--zipf-exponent", sp.zipf_exponent, "Exponent of the popularity law")->capture_default_str();
  gen->add_option("--related-out", gen_related, "Related-lists output file")->required();
  gen->add_option("--popularity-out", gen_popularity, "Popularity CSV output file");

  // explore
  auto* explore = app.add_subcommand("explore", "Print the BFS exploration list of a content");
  DatasetOptions explore_data;
  explore_data.add_to(*explore);
  std::string explore_seed, explore_out;
  BfsParams explore_params;
  explore->add_option("--seed-id", explore_seed, "Content to explore from")->required();
  explore->add_option("--depth", explore_params.depth, "BFS depth")->capture_default_str();
  explore->add_option("--width", explore_params.width, "BFS width")->capture_default_str();
  explore->add_option("--out", explore_out, "Output CSV (default stdout)");

  // recommend
  auto* rec = app.add_subcommand("recommend", "Print CABaRet recommendations for a content");
  DatasetOptions rec_data;
  rec_data.add_to(*rec);
  std::string rec_seed, rec_cache, rec_out;
  std::size_t rec_count = 20;
  BfsParams rec_params;
  rec->add_option("--seed-id", rec_seed, "Content being watched")->required();
  rec->add_option("-N", rec_count, "Number of recommendations")->capture_default_str()->check(CLI::PositiveNumber);
  rec->add_option("--depth", rec_params.depth, "BFS depth")->capture_default_str();
  rec->add_option("--width", rec_params.width, "BFS width")->capture_default_str();
  rec->add_option("--cache-file", rec_cache, "Cached IDs, one per line")->required()->check(CLI::ExistingFile);
  rec->add_option("--out", rec_out, "Output CSV (default stdout)");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Choose a cache placement");
  DatasetOptions opt_data;
  opt_data.add_to(*opt);
  std::string method = "greedy", demand = "uniform", candidates = "explored", manifest_out, trajectory_out;
  std::size_t capacity = 0, opt_count = 20, front = 50;
  BfsParams opt_params;
  opt->add_option("--method", method, "top, greedy or exact")
      ->capture_default_str()
      ->check(CLI::IsMember({"top", "greedy", "exact"}));
  opt->add_option("--capacity", capacity, "Cache capacity")->required()->check(CLI::PositiveNumber);
  opt->add_option("-N", opt_count, "Recommendation list length")->capture_default_str()->check(CLI::PositiveNumber);
  opt->add_option("--depth", opt_params.depth, "BFS depth")->capture_default_str();
  opt->add_option("--width", opt_params.width, "BFS width")->capture_default_str();
  opt->add_option("--demand", demand, "uniform or zipf:<alpha>")->capture_default_str();
  opt->add_option("--front-page", front, "Number of popular contents in the objective")->capture_default_str();
  opt->add_option("--candidates", candidates, "explored or catalog")
      ->capture_default_str()
      ->check(CLI::IsMember({"explored", "catalog"}));
  opt->add_option("--out", manifest_out, "Cache manifest output (one ID per line)")->required();
  opt->add_option("--trajectory", trajectory_out, "Trajectory CSV output (step,id,objective)");

  // eval-iv
  auto* iv = app.add_subcommand("eval-iv", "Measure the depth-1/depth-2 overlap I(v)");
  DatasetOptions iv_data;
  iv_data.add_to(*iv);
  std::size_t iv_width = 50, iv_population = 50;
  std::string iv_out, iv_per_seed;
  iv->add_option("--width", iv_width, "BFS width")->capture_default_str()->check(CLI::PositiveNumber);
  iv->add_option("--population", iv_population, "Number of most popular seeds")->capture_default_str()->check(CLI::PositiveNumber);
  iv->add_option("--out", iv_out, "Summary CSV (default stdout)");
  iv->add_option("--per-seed", iv_per_seed, "Per-seed CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = load_config(config_path);
      if (workers) config.workers = workers;
      const auto result = run_experiment(config);
      write_outputs(result, config, out_dir);
      std::cerr << fmt::format("{} rows, {} failures, {:.2f} s -> {}\n", result.rows.size(), result.failures.size(),
                               result.wall_seconds, out_dir);
      return result.failures.empty() ? 0 : 3;
    }
    if (*gen) {
      SyntheticCalibration cal;
      const auto cat = generate_synthetic(sp, &cal);
      std::optional<std::filesystem::path> pop;
      if (!gen_popularity.empty()) pop = gen_popularity;
      save_dataset(cat, gen_related, pop);
      std::cerr << fmt::format("{} contents, {} communities, mixing {:.4f}, median I(v) {:.4f}\n", cat.size(),
                               cal.communities, cal.mixing, cal.measured_median);
      return 0;
    }
    if (*explore) {
      const auto oracle = explore_data.open();
      const auto list = bfs(oracle.catalog().at(explore_seed), explore_params, oracle);
      std::string out = "rank,id,depth\n";
      for (std::size_t i = 0; i < list.size(); ++i) {
        out += fmt::format("{},{},{}\n", i + 1, csv_field(oracle.catalog().name(list.entries[i].id)),
                           list.entries[i].depth);
      }
      emit(explore_out, out);
      return 0;
    }
    if (*rec) {
      const auto oracle = rec_data.open();
      std::vector<std::string> unknown;
      const auto cache = load_cache_manifest(rec_cache, oracle.catalog(), &unknown);
      if (!unknown.empty()) std::cerr << fmt::format("warning: {} cached IDs are not in the catalog\n", unknown.size());
      const auto list = recommend(oracle.catalog().at(rec_seed), rec_count, cache, rec_params, oracle);
      if (list.empty_exploration) std::cerr << "warning: empty exploration list\n";
      std::string out = "rank,id,cached\n";
      for (std::size_t i = 0; i < list.size(); ++i) {
        out += fmt::format("{},{},{}\n", i + 1, csv_field(oracle.catalog().name(list.entries[i].id)),
                           list.entries[i].cached ? 1 : 0);
      }
      emit(rec_out, out);
      return 0;
    }
    if (*opt) {
      const auto oracle = opt_data.open();
      const Catalog& catalog = oracle.catalog();
      const auto region = top_popular(catalog, front);
      const auto spec = ObjectiveSpec::front_page(region, opt_count, DemandSpec::parse(demand).distribution(opt_count),
                                                  opt_params, oracle);
      std::vector<ContentId> pool;
      if (candidates == "catalog") {
        for (std::uint32_t i = 0; i < catalog.size(); ++i) pool.emplace_back(i);
      } else {
        pool = spec.explored_union();
      }
      PlacementResult placement;
      switch (parse_placement_method(method)) {
        case PlacementMethod::kTop:
          placement = top_placement(catalog, capacity);
          annotate_trajectory(placement, spec);
          break;
        case PlacementMethod::kGreedy:
          placement = greedy_placement(spec, capacity, pool);
          break;
        case PlacementMethod::kExact:
          placement = exact_placement(spec, capacity, pool);
          break;
      }
      emit(manifest_out, format_cache_manifest(CacheManifest(placement.chosen), catalog));
      if (!trajectory_out.empty()) {
        std::string t = "step,id,objective\n";
        for (std::size_t i = 0; i < placement.chosen.size(); ++i) {
          t += fmt::format("{},{},{}\n", i + 1, csv_field(catalog.name(placement.chosen[i])), placement.trajectory[i]);
        }
        emit(trajectory_out, t);
      }
      std::cerr << fmt::format("{} contents cached, objective {:.6f}\n", placement.chosen.size(), placement.value());
      return 0;
    }
    if (*iv) {
      const auto oracle = iv_data.open();
      const auto seeds = top_popular(oracle.catalog(), iv_population);
      const auto report = eval_iv(seeds, iv_width, oracle);
      emit(iv_out, format_overlap_csv(report));
      if (!iv_per_seed.empty()) emit(iv_per_seed, format_overlap_per_seed_csv(report, oracle.catalog()));
      return 0;
    }
    std::cout << app.help();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
