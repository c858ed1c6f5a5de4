// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cabaret/cache_policy.hpp"
#include "cabaret/experiment.hpp"
#include "cabaret/metrics.hpp"
#include "cabaret/recommender.hpp"
#include "fixtures.hpp"

#ifndef CABARET_SOURCE_DIR
#define CABARET_SOURCE_DIR "."
#endif

using namespace cabaret;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, std::string_view title, const Outcome& o) {
  if (!o.pass) ++failures;
  std::cout << fmt::format("criterion {:>2}: {} {} ({})", id, o.pass ? "PASS" : "FAIL", title, o.detail)
            << std::endl;
}

void run(int id, std::string_view title, const std::function<Outcome()>& fn) {
  try {
    report(id, title, fn());
  } catch (const std::exception& e) {
    report(id, title, {false, std::string("exception: ") + e.what()});
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path standard_config_path() {
  return std::filesystem::path(CABARET_SOURCE_DIR) / "configs" / "standard.json";
}

// The standard matrix is shared by several criteria; it is run once here and
// again for the determinism check.
struct StandardRun {
  ExperimentConfig config;
  std::shared_ptr<const Catalog> catalog;
  ExperimentResult result;
  double seconds = 0.0;
};

const StandardRun& standard() {
  static const StandardRun run = [] {
    StandardRun s;
    const auto t = Clock::now();
    s.config = load_config(standard_config_path());
    s.catalog = build_catalog(s.config.catalog);
    s.result = run_experiment(s.config, s.catalog);
    s.seconds = seconds_since(t);
    return s;
  }();
  return run;
}

using CellKey = std::tuple<RecommenderKind, std::size_t, std::string, std::size_t>;

std::map<CellKey, double> chr_by_cell(const ExperimentResult& r) {
  std::map<CellKey, double> out;
  for (const auto& row : r.rows) {
    out[{row.cell.recommender, row.cell.capacity, row.cell.demand.label(), row.cell.steps}] = row.report.chr;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct Trace {
  std::string name;
  fixtures::Records records;
  std::string seed;
  BfsParams params;
  std::size_t count;
  std::vector<std::string> cache;
  std::vector<std::string> expected;
};

fixtures::Records tree() {
  fixtures::Records r{{"s", {"a", "b", "c"}}};
  for (std::string p : {"a", "b", "c"}) r.push_back({p, {p + "1", p + "2", p + "3"}});
  return r;
}

fixtures::Records letters() {
  std::vector<std::string> l;
  for (char c = 'a'; c <= 'l'; ++c) l.emplace_back(1, c);
  return {{"s", l}, {"x", {}}};
}

Outcome algorithm_fidelity() {
  const fixtures::Records shared{{"s", {"a", "b", "c", "d"}}, {"a", {"b", "e", "f"}}, {"b", {"s", "e", "g"}},
                                 {"c", {"h"}}, {"d", {}}};
  const std::vector<Trace> traces{
      {"tree D2 W3 N6", tree(), "s", {2, 3}, 6, {"b3", "a2", "c"}, {"c", "a2", "b3", "a", "b", "a1"}},
      {"tree empty cache", tree(), "s", {2, 3}, 6, {}, {"a", "b", "c", "a1", "a2", "a3"}},
      {"tree cache fills N", tree(), "s", {2, 3}, 6, {"c3", "c2", "c1", "b1", "a1", "a3", "b2"},
       {"a1", "a3", "b1", "b2", "c1", "c2"}},
      {"tree depth 1", tree(), "s", {1, 3}, 6, {"b", "a2"}, {"b", "a", "c"}},
      {"cycle", {{"a", {"b"}}, {"b", {"c"}}, {"c", {"a"}}}, "a", {3, 1}, 2, {"c"}, {"c", "b"}},
      {"width counts repeats", shared, "s", {2, 2}, 3, {"g", "e"}, {"e", "a", "b"}},
      {"shared neighbours", shared, "s", {2, 3}, 4, {"g", "h"}, {"g", "h", "a", "b"}},
      {"depth limit", {{"s", {"a"}}, {"a", {"b"}}, {"b", {"c"}}, {"c", {"d"}}}, "s", {3, 1}, 5, {"d", "c"},
       {"c", "a", "b"}},
      {"twelve letters", letters(), "s", {1, 12}, 6, {"d", "f", "x"}, {"d", "f", "a", "b", "c", "e"}},
      {"short list", {{"s", {"a", "b"}}, {"a", {"c"}}, {"b", {"c", "d"}}}, "s", {2, 5}, 10, {"d"},
       {"d", "a", "b", "c"}},
      {"empty exploration", {{"s", {}}, {"t", {"s"}}}, "s", {2, 5}, 3, {"t"}, {}},
      {"more cached than N", {{"s", {"a", "b", "c", "d", "e"}}}, "s", {1, 5}, 2, {"e", "c", "a"}, {"a", "c"}},
  };
  const auto t = Clock::now();
  std::size_t matched = 0;
  std::string first_miss;
  for (const auto& tr : traces) {
    auto cat = fixtures::catalog(tr.records);
    RelationOracle oracle(cat);
    const CacheManifest cache(fixtures::ids(*cat, tr.cache));
    const auto r = recommend(cat->at(tr.seed), tr.count, cache, tr.params, oracle);
    bool ok = fixtures::names(*cat, r.ids()) == tr.expected;
    for (const auto& e : r.entries) ok = ok && e.cached == cache.contains(e.id);
    ok = ok && r.empty_exploration == tr.expected.empty();
    if (ok) {
      ++matched;
    } else if (first_miss.empty()) {
      first_miss = tr.name;
    }
  }
  const double secs = seconds_since(t);
  const bool pass = matched == traces.size() && traces.size() >= 10 && secs < 1.0;
  return {pass, fmt::format("{}/{} traces match, {:.3f} s{}", matched, traces.size(), secs,
                            first_miss.empty() ? "" : ", first mismatch: " + first_miss)};
}

// ---------------------------------------------------------------------------

struct RandomSpec {
  std::shared_ptr<const Catalog> catalog;
  std::unique_ptr<RelationOracle> oracle;
  std::unique_ptr<ObjectiveSpec> spec;
};

RandomSpec random_spec(Rng& rng, std::size_t min_size, std::size_t max_size, std::size_t max_len,
                       std::size_t max_depth) {
  RandomSpec out;
  const std::size_t size = min_size + rng.uniform_index(max_size - min_size + 1);
  out.catalog = fixtures::random_catalog(rng, size, max_len);
  out.oracle = std::make_unique<RelationOracle>(out.catalog);
  std::vector<ContentId> support;
  std::vector<double> weights;
  for (std::uint32_t i = 0; i < size; ++i) {
    if (rng.uniform() < 0.5) {
      support.emplace_back(i);
      weights.push_back(0.05 + rng.uniform());
    }
  }
  if (support.empty()) {
    support.emplace_back(0);
    weights.push_back(1.0);
  }
  const std::size_t n = 1 + rng.uniform_index(4);
  const double law = rng.uniform();
  const auto dist = law < 0.4 ? position_probs(PositionLaw::kUniform, 0.0, n)
                              : position_probs(PositionLaw::kZipf, 2.0 * rng.uniform(), n);
  const BfsParams params{1 + rng.uniform_index(max_depth), 1 + rng.uniform_index(max_len)};
  out.spec = std::make_unique<ObjectiveSpec>(support, weights, n, dist, params, *out.oracle);
  return out;
}

Outcome greedy_bound() {
  const auto t = Clock::now();
  Rng rng(derive_seed(1, "greedy-bound"));
  const double factor = 1.0 - std::exp(-1.0);
  std::size_t instances = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 250; ++i) {
    auto in = random_spec(rng, 4, 12, 4, 2);
    std::vector<ContentId> pool;
    for (std::uint32_t c = 0; c < in.catalog->size(); ++c) pool.emplace_back(c);
    for (std::size_t cap = 1; cap <= 4; ++cap) {
      const double g = greedy_placement(*in.spec, cap, pool).value();
      const double e = exact_placement(*in.spec, cap, pool).value();
      ++instances;
      if (g < factor * e) ++violations;
      if (e > 0.0) worst = std::min(worst, g / e);
    }
  }
  const double secs = seconds_since(t);
  return {violations == 0 && instances >= 200 && secs < 60.0,
          fmt::format("{} instances, {} violations, worst greedy/exact {:.4f} vs bound {:.4f}, {:.2f} s",
                      instances, violations, worst, factor, secs)};
}

Outcome submodularity() {
  const auto t = Clock::now();
  Rng rng(derive_seed(2, "submodularity"));
  std::size_t trials = 0, mono = 0, sub = 0;
  for (int i = 0; i < 20; ++i) {
    auto in = random_spec(rng, 8, 40, 6, 3);
    const auto r = check_submodularity(*in.spec, 10000, rng.next_u64(), 1e-12);
    trials += r.trials;
    mono += r.monotonicity_violations;
    sub += r.submodularity_violations;
  }
  const double secs = seconds_since(t);
  return {mono == 0 && sub == 0 && trials == 200000 && secs < 60.0,
          fmt::format("20 specs, {} triples, {} monotonicity and {} submodularity violations, {:.2f} s", trials,
                      mono, sub, secs)};
}

// ---------------------------------------------------------------------------

Outcome dominance() {
  const auto& s = standard();
  const auto chr = chr_by_cell(s.result);
  std::size_t groups = 0, order_violations = 0, equality_violations = 0;
  for (std::size_t c : s.config.capacities) {
    for (const auto& d : s.config.demands) {
      for (std::size_t k : s.config.steps) {
        const auto label = d.label();
        const double b = chr.at({RecommenderKind::kBaseline, c, label, k});
        const double r = chr.at({RecommenderKind::kReordered, c, label, k});
        const double x = chr.at({RecommenderKind::kCabaret, c, label, k});
        ++groups;
        if (!(b <= r && r <= x)) ++order_violations;
        if (d.law == PositionLaw::kUniform && b != r) ++equality_violations;
      }
    }
  }
  const bool pass = s.result.failures.empty() && s.result.rows.size() == 90 && groups == 30 &&
                    order_violations == 0 && equality_violations == 0 && s.seconds < 600.0;
  return {pass, fmt::format("{} cells, {} ordering and {} uniform-equality violations, V = {}, {:.1f} s",
                            s.result.rows.size(), order_violations, equality_violations, s.catalog->size(),
                            s.seconds)};
}

Outcome relative_gain() {
  const auto& s = standard();
  RelationOracle oracle(s.catalog, s.config.width_cap);
  const double iv = eval_iv(top_popular(*s.catalog, 50), 50, oracle).median;
  const auto chr = chr_by_cell(s.result);
  double worst = std::numeric_limits<double>::infinity();
  std::string parts;
  for (const char* d : {"uniform", "zipf:1"}) {
    const double base = chr.at({RecommenderKind::kBaseline, 50, d, 2});
    const double cab = chr.at({RecommenderKind::kCabaret, 50, d, 2});
    const double ratio = base > 0.0 ? cab / base : std::numeric_limits<double>::infinity();
    worst = std::min(worst, ratio);
    parts += fmt::format(", {}: {:.4f}/{:.4f} = {:.1f}x", d, cab, base, ratio);
  }
  return {iv >= 0.9 && worst >= 3.0, fmt::format("median I(v) = {:.3f}{}, floor 3x", iv, parts)};
}

Outcome greedy_vs_top() {
  const auto& s = standard();
  auto config = s.config;
  config.recommenders = {RecommenderKind::kCabaret};
  config.policies = {PlacementMethod::kTop, PlacementMethod::kGreedy};
  config.capacities = {10, 20};
  config.demands = {DemandSpec::parse("uniform")};
  config.steps = {2};
  config.evaluation = EvaluationMode::kSample;
  config.sessions = 20000;
  const auto r = run_experiment(config, s.catalog);
  if (!r.failures.empty()) return {false, r.failures.front().error};

  bool pass = true;
  std::string parts;
  for (std::size_t c : {10, 20}) {
    const ResultRow* top = nullptr;
    const ResultRow* greedy = nullptr;
    for (const auto& row : r.rows) {
      if (row.cell.capacity != c) continue;
      (row.cell.policy == PlacementMethod::kTop ? top : greedy) = &row;
    }
    const double obj = greedy->objective / top->objective;
    const double sim = greedy->report.chr / top->report.chr;
    pass = pass && obj >= 1.3 && sim >= 1.3;
    parts += fmt::format("{}C={}: objective {:.2f}x, simulated CHR {:.2f}x (greedy CHR {:.4f} +- {:.4f})",
                         parts.empty() ? "" : "; ", c, obj, sim, greedy->report.chr, greedy->report.std_error);
  }
  return {pass, parts + ", floor 1.3x"};
}

Outcome monte_carlo_agreement() {
  Rng rng(derive_seed(3, "monte-carlo"));
  std::size_t agree = 0;
  double worst_z = 0.0;
  for (int i = 0; i < 10; ++i) {
    SyntheticParams p{.size = 1000 + 250 * static_cast<std::size_t>(i % 3),
                      .related_length = 20,
                      .overlap = 0.3 + 0.06 * i,
                      .seed = rng.next_u64()};
    auto cat = std::make_shared<const Catalog>(generate_synthetic(p));
    RelationOracle oracle(cat);
    const auto front = top_popular(*cat, 50);
    const std::size_t n = 5 + rng.uniform_index(16);
    const auto kind = static_cast<RecommenderKind>(i % 3);
    const std::size_t cap = 5 + rng.uniform_index(46);
    auto cache = std::make_shared<const CacheManifest>(top_popular(*cat, cap).ids);
    const Recommender rec(kind, n, {2, 20}, cache, oracle);
    const RecommendFn fn = [&rec](ContentId v) { return rec(v); };
    const auto dist = i % 2 == 0 ? position_probs(PositionLaw::kUniform, 0.0, n)
                                 : position_probs(PositionLaw::kZipf, 0.5 + 0.1 * i, n);
    const std::uint64_t seed = rng.next_u64();
    std::vector<Session> sessions;
    sessions.reserve(100000);
    for (std::uint64_t m = 0; m < 100000; ++m) {
      sessions.push_back(run_session(2, front, fn, *cache, dist, derive_seed(seed, m)));
    }
    const auto sampled = chr_single(sessions);
    const double exact = enumerate_single_requests(front, fn, dist);
    const double diff = std::abs(sampled.chr - exact);
    if (diff <= 3.0 * sampled.std_error || (sampled.std_error == 0.0 && diff < 1e-12)) ++agree;
    if (sampled.std_error > 0.0) worst_z = std::max(worst_z, diff / sampled.std_error);
  }
  return {agree == 10, fmt::format("{}/10 scenarios within 3 standard errors, largest |z| = {:.2f}", agree, worst_z)};
}

Outcome determinism() {
  const auto& s = standard();
  const auto base = std::filesystem::temp_directory_path() / "cabaret_acceptance";
  std::filesystem::remove_all(base);
  write_outputs(s.result, s.config, base / "first");
  auto config = load_config(standard_config_path());
  write_outputs(run_experiment(config), config, base / "second");
  const auto a = read_file(base / "first" / "results.csv");
  const auto b = read_file(base / "second" / "results.csv");
  std::filesystem::remove_all(base);
  return {!a.empty() && a == b, fmt::format("results.csv {} bytes, {}", a.size(), a == b ? "identical" : "differs")};
}

Outcome overlap_metric() {
  struct Case {
    fixtures::Records records;
    std::size_t width;
    double expected;
  };
  const std::vector<Case> cases{
      {{{"v", {"a", "b"}}, {"a", {"b"}}, {"b", {"a"}}}, 50, 1.0},
      {{{"v", {"a", "b"}}, {"a", {"c"}}, {"b", {"d"}}}, 50, 0.0},
      {{{"v", {"a", "b", "c", "d"}}, {"a", {"b", "x"}}, {"b", {"v"}}, {"c", {"y"}}, {"d", {"a"}}}, 50, 0.5},
      {{{"v", {}}}, 50, 0.0},
      {{{"v", {"a", "b", "c"}}, {"a", {"x", "c"}}, {"b", {"y"}}, {"c", {"z"}}}, 3, 1.0 / 3.0},
      {{{"v", {"a", "b", "c"}}, {"a", {"x", "c"}}, {"b", {"y"}}, {"c", {"z"}}}, 2, 0.0},
  };
  std::size_t exact = 0;
  for (const auto& c : cases) {
    auto cat = fixtures::catalog(c.records);
    RelationOracle oracle(cat);
    const auto rep = eval_iv({{cat->at("v")}, false}, c.width, oracle);
    if (rep.values.size() == 1 && rep.values[0] == c.expected && rep.median == c.expected) ++exact;
  }
  return {exact == cases.size(), fmt::format("{}/{} fixtures exact", exact, cases.size())};
}

Outcome sequential_decay() {
  const auto& s = standard();
  auto config = s.config;
  config.recommenders = {RecommenderKind::kCabaret};
  config.widths = {20};
  config.capacities = {20};
  config.demands = {DemandSpec::parse("uniform"), DemandSpec::parse("zipf:1")};
  config.steps = {2, 10};
  config.evaluation = EvaluationMode::kAuto;
  config.sessions = 1000;
  const auto r = run_experiment(config, s.catalog);
  if (!r.failures.empty()) return {false, r.failures.front().error};

  bool rates_ok = true;
  std::map<std::pair<std::string, std::size_t>, double> chr;
  for (const auto& row : r.rows) {
    for (double x : row.report.step_rates) rates_ok = rates_ok && std::isfinite(x) && x >= 0.0 && x <= 1.0;
    chr[{row.cell.demand.label(), row.cell.steps}] = row.report.chr;
  }
  bool pass = rates_ok;
  std::string parts;
  for (const char* d : {"uniform", "zipf:1"}) {
    const double ratio = chr.at({d, 10}) / chr.at({d, 2});
    pass = pass && ratio >= 0.5;
    parts += fmt::format(", {}: K=10 {:.4f} vs K=2 {:.4f} ({:.2f}x)", d, chr.at({d, 10}), chr.at({d, 2}), ratio);
  }
  return {pass, fmt::format("per-k rates {}{}, floor 0.5x", rates_ok ? "in [0,1]" : "out of range", parts)};
}

}  // namespace

int main() {
  run(1, "CABaRet matches hand-executed traces", algorithm_fidelity);
  run(2, "greedy within 1 - 1/e of exact", greedy_bound);
  run(3, "objective is monotone and submodular", submodularity);
  run(4, "baseline <= reordered <= cabaret on the standard matrix", dominance);
  run(5, "cabaret/baseline hit-ratio gain on a high-overlap catalog", relative_gain);
  run(6, "greedy placement beats top placement", greedy_vs_top);
  run(7, "sampled single-request CHR agrees with enumeration", monte_carlo_agreement);
  run(8, "standard matrix is byte-for-byte reproducible", determinism);
  run(9, "I(v) matches hand-computed fixtures", overlap_metric);
  run(10, "sequential hit ratio decays slowly with K", sequential_decay);
  std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
