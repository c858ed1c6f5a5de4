#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cabaret/bfs.hpp"
#include "cabaret/cache_policy.hpp"
#include "cabaret/error.hpp"
#include "cabaret/experiment.hpp"
#include "cabaret/metrics.hpp"
#include "cabaret/recommender.hpp"

namespace py = pybind11;
using namespace cabaret;

namespace {

// Python-facing catalog handle. Contents are addressed by name throughout.
struct PyCatalog {
  std::shared_ptr<const Catalog> ptr;

  RelationOracle oracle(std::size_t w_max) const { return RelationOracle(ptr, w_max); }
  const Catalog& get() const { return *ptr; }

  std::vector<std::string> names(std::span<const ContentId> ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (ContentId id : ids) out.emplace_back(ptr->name(id));
    return out;
  }

  std::vector<ContentId> ids(const std::vector<std::string>& names) const {
    std::vector<ContentId> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(ptr->at(n));
    return out;
  }
};

PyCatalog wrap(Catalog c) { return {std::make_shared<const Catalog>(std::move(c))}; }

ObjectiveSpec front_page_spec(const PyCatalog& cat, const RelationOracle& oracle, std::size_t n, std::size_t depth,
                              std::size_t width, const std::string& demand, std::size_t front_page) {
  return ObjectiveSpec::front_page(top_popular(cat.get(), front_page), n, DemandSpec::parse(demand).distribution(n),
                                   {depth, width}, oracle);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cache-aware BFS recommendations and cache placement";
  m.attr("__version__") = std::string(kToolVersion);
  m.attr("schema_version") = std::string(kSchemaVersion);

  auto base = py::register_exception<Error>(m, "CabaretError", PyExc_RuntimeError);
  py::register_exception<CatalogMissError>(m, "CatalogMissError", base.ptr());
  auto parse = py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DuplicateDefinitionError>(m, "DuplicateDefinitionError", parse.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<InstanceTooLargeError>(m, "InstanceTooLargeError", base.ptr());
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base.ptr());

  py::class_<PyCatalog>(m, "Catalog")
      .def_static(
          "load",
          [](const std::filesystem::path& related, std::optional<std::filesystem::path> popularity) {
            return wrap(load_dataset(related, popularity));
          },
          py::arg("related_file"), py::arg("popularity_file") = py::none())
      .def_static(
          "from_strings",
          [](const std::string& related, std::optional<std::string> popularity) {
            std::optional<std::string_view> pop;
            if (popularity) pop = *popularity;
            return wrap(load_dataset_from_strings(related, pop));
          },
          py::arg("related_text"), py::arg("popularity_text") = py::none())
      .def_static(
          "synthetic",
          [](std::size_t size, std::size_t related_length, double overlap, std::uint64_t seed,
             std::size_t community_size, double zipf_exponent) {
            SyntheticParams p;
            p.size = size;
            p.related_length = related_length;
            p.overlap = overlap;
            p.seed = seed;
            p.community_size = community_size;
            p.zipf_exponent = zipf_exponent;
            return wrap(generate_synthetic(p));
          },
          py::arg("size") = 1000, py::arg("related_length") = 50, py::arg("overlap") = 0.9, py::arg("seed") = 0,
          py::arg("community_size") = 0, py::arg("zipf_exponent") = 1.0)
      .def("__len__", [](const PyCatalog& c) { return c.get().size(); })
      .def("__contains__", [](const PyCatalog& c, const std::string& id) { return c.get().find(id).has_value(); })
      .def("__eq__", [](const PyCatalog& a, const PyCatalog& b) { return a.get() == b.get(); })
      .def("names", [](const PyCatalog& c) {
        return std::vector<std::string>(c.get().names().begin(), c.get().names().end());
      })
      .def(
          "related",
          [](const PyCatalog& c, const std::string& id, std::size_t width, std::size_t w_max) {
            return c.names(c.oracle(w_max).related(c.get().at(id), width));
          },
          py::arg("id"), py::arg("width") = 50, py::arg("w_max") = RelationOracle::kDefaultWidthCap)
      .def("popularity", [](const PyCatalog& c, const std::string& id) { return c.get().popularity(c.get().at(id)); })
      .def(
          "top_popular", [](const PyCatalog& c, std::size_t count) { return c.names(top_popular(c.get(), count).ids); },
          py::arg("count"))
      .def("canonical_related_lines", [](const PyCatalog& c) { return canonical_related_lines(c.get()); })
      .def("canonical_popularity_csv", [](const PyCatalog& c) { return canonical_popularity_csv(c.get()); })
      .def(
          "save",
          [](const PyCatalog& c, const std::filesystem::path& related, std::optional<std::filesystem::path> pop) {
            save_dataset(c.get(), related, pop);
          },
          py::arg("related_file"), py::arg("popularity_file") = py::none());

  m.def(
      "explore",
      [](const PyCatalog& c, const std::string& seed, std::size_t depth, std::size_t width, std::size_t w_max) {
        const auto oracle = c.oracle(w_max);
        const auto list = bfs(c.get().at(seed), {depth, width}, oracle);
        std::vector<std::pair<std::string, std::uint32_t>> out;
        for (const auto& e : list.entries) out.emplace_back(c.get().name(e.id), e.depth);
        return out;
      },
      py::arg("catalog"), py::arg("seed_id"), py::arg("depth") = 2, py::arg("width") = 50,
      py::arg("w_max") = RelationOracle::kDefaultWidthCap,
      "Ordered BFS exploration list as (id, depth) pairs.");

  m.def(
      "recommend",
      [](const PyCatalog& c, const std::string& seed, std::size_t n, const std::vector<std::string>& cache,
         std::size_t depth, std::size_t width, std::size_t w_max) {
        const auto oracle = c.oracle(w_max);
        std::vector<ContentId> cached;
        for (const auto& name : cache) {
          if (auto id = c.get().find(name)) cached.push_back(*id);
        }
        const auto list = recommend(c.get().at(seed), n, CacheManifest(cached), {depth, width}, oracle);
        std::vector<std::pair<std::string, bool>> out;
        for (const auto& e : list.entries) out.emplace_back(c.get().name(e.id), e.cached);
        return out;
      },
      py::arg("catalog"), py::arg("seed_id"), py::arg("n"), py::arg("cache"), py::arg("depth") = 2,
      py::arg("width") = 50, py::arg("w_max") = RelationOracle::kDefaultWidthCap,
      "CABaRet recommendations as (id, cached) pairs. Unknown cache IDs are ignored.");

  m.def(
      "position_probs",
      [](const std::string& demand, std::size_t n) {
        const auto d = DemandSpec::parse(demand).distribution(n);
        return std::vector<double>(d.probs().begin(), d.probs().end());
      },
      py::arg("demand"), py::arg("n"), "Click probabilities for 'uniform' or 'zipf:<alpha>'.");

  m.def(
      "eval_iv",
      [](const PyCatalog& c, std::size_t width, std::size_t population, std::size_t w_max) {
        const auto oracle = c.oracle(w_max);
        const auto rep = eval_iv(top_popular(c.get(), population), width, oracle);
        py::dict out;
        out["median"] = rep.median;
        out["mean"] = rep.mean;
        out["seeds"] = c.names(rep.seeds);
        out["values"] = rep.values;
        return out;
      },
      py::arg("catalog"), py::arg("width") = 50, py::arg("population") = 50,
      py::arg("w_max") = RelationOracle::kDefaultWidthCap);

  m.def(
      "objective",
      [](const PyCatalog& c, const std::vector<std::string>& cache, std::size_t n, std::size_t depth,
         std::size_t width, const std::string& demand, std::size_t front_page, std::size_t w_max) {
        const auto oracle = c.oracle(w_max);
        return front_page_spec(c, oracle, n, depth, width, demand, front_page).objective(c.ids(cache));
      },
      py::arg("catalog"), py::arg("cache"), py::arg("n") = 20, py::arg("depth") = 2, py::arg("width") = 50,
      py::arg("demand") = "uniform", py::arg("front_page") = 50, py::arg("w_max") = RelationOracle::kDefaultWidthCap,
      "Expected hit ratio of a placement over the front page.");

  m.def(
      "place",
      [](const PyCatalog& c, const std::string& method, std::size_t capacity, std::size_t n, std::size_t depth,
         std::size_t width, const std::string& demand, std::size_t front_page, const std::string& candidates,
         std::size_t w_max) {
        const auto oracle = c.oracle(w_max);
        const auto spec = front_page_spec(c, oracle, n, depth, width, demand, front_page);
        std::vector<ContentId> pool;
        if (candidates == "catalog") {
          for (std::uint32_t i = 0; i < c.get().size(); ++i) pool.emplace_back(i);
        } else if (candidates == "explored") {
          pool = spec.explored_union();
        } else {
          throw ParameterError("candidates must be 'explored' or 'catalog'");
        }
        PlacementResult r;
        switch (parse_placement_method(method)) {
          case PlacementMethod::kTop:
            r = top_placement(c.get(), capacity);
            annotate_trajectory(r, spec);
            break;
          case PlacementMethod::kGreedy:
            r = greedy_placement(spec, capacity, pool);
            break;
          case PlacementMethod::kExact:
            r = exact_placement(spec, capacity, pool);
            break;
        }
        py::dict out;
        out["chosen"] = c.names(r.chosen);
        out["trajectory"] = r.trajectory;
        out["zero_gain"] = r.zero_gain;
        out["objective"] = r.value();
        return out;
      },
      py::arg("catalog"), py::arg("method"), py::arg("capacity"), py::arg("n") = 20, py::arg("depth") = 2,
      py::arg("width") = 50, py::arg("demand") = "uniform", py::arg("front_page") = 50,
      py::arg("candidates") = "explored", py::arg("w_max") = RelationOracle::kDefaultWidthCap);

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::filesystem::path& base_dir,
         std::optional<std::filesystem::path> out_dir) {
        const auto config = parse_config(config_text, base_dir);
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config);
        }
        if (out_dir) write_outputs(result, config, *out_dir);
        py::dict out;
        out["results_csv"] = format_results_csv(result);
        out["failures_csv"] = format_failures_csv(result);
        out["rows"] = result.rows.size();
        out["failures"] = result.failures.size();
        return out;
      },
      py::arg("config_text"), py::arg("base_dir") = std::filesystem::path{}, py::arg("out_dir") = py::none(),
      "Runs a JSON experiment config and returns the CSV outputs.");
}
