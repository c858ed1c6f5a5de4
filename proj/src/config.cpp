#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "cabaret/error.hpp"
#include "cabaret/experiment.hpp"

namespace cabaret {
namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kTopLevelKeys = {
    "seed",     "catalog", "w_max",      "front_page", "N",          "recommenders", "depth",
    "width",    "cache_policy", "capacity", "demand", "K", "sessions", "evaluation",
    "candidates", "workers"};

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParameterError(fmt::format("config is missing \"{}\"", key));
  return *it;
}

std::size_t positive(const json& value, std::string_view what) {
  if (!value.is_number_integer() || value.get<long long>() < 1) {
    throw ParameterError(fmt::format("\"{}\" must be a positive integer", what));
  }
  return value.get<std::size_t>();
}

// Accepts a scalar or a non-empty array.
template <typename T, typename Convert>
std::vector<T> sweep(const json& doc, const char* key, Convert convert) {
  const auto& value = require(doc, key);
  std::vector<T> out;
  if (value.is_array()) {
    if (value.empty()) throw ParameterError(fmt::format("sweep \"{}\" is empty", key));
    for (const auto& v : value) out.push_back(convert(v));
  } else {
    out.push_back(convert(value));
  }
  return out;
}

std::string string_of(const json& v, std::string_view what) {
  if (!v.is_string()) throw ParameterError(fmt::format("\"{}\" entries must be strings", what));
  return v.get<std::string>();
}

CatalogSource parse_catalog(const json& node, const std::filesystem::path& base_dir) {
  if (!node.is_object()) throw ParameterError("\"catalog\" must be an object");
  CatalogSource source;
  if (auto it = node.find("synthetic"); it != node.end()) {
    const auto& s = *it;
    if (!s.is_object()) throw ParameterError("\"catalog.synthetic\" must be an object");
    SyntheticParams p;
    for (const auto& [k, v] : s.items()) {
      if (k == "size") {
        p.size = positive(v, "catalog.synthetic.size");
      } else if (k == "related_length") {
        p.related_length = positive(v, "catalog.synthetic.related_length");
      } else if (k == "overlap") {
        p.overlap = v.get<double>();
      } else if (k == "seed") {
        p.seed = v.get<std::uint64_t>();
      } else if (k == "community_size") {
        p.community_size = positive(v, "catalog.synthetic.community_size");
      } else if (k == "zipf_exponent") {
        p.zipf_exponent = v.get<double>();
      } else if (k == "calibration_population") {
        p.calibration_population = positive(v, "catalog.synthetic.calibration_population");
      } else {
        throw ParameterError(fmt::format("unknown key \"catalog.synthetic.{}\"", k));
      }
    }
    source.synthetic = p;
    if (node.size() != 1) throw ParameterError("\"catalog\" takes either \"synthetic\" or files, not both");
    return source;
  }
  for (const auto& [k, v] : node.items()) {
    if (k != "related_file" && k != "popularity_file") {
      throw ParameterError(fmt::format("unknown key \"catalog.{}\"", k));
    }
  }
  auto resolve = [&](const json& v) {
    std::filesystem::path p = string_of(v, "catalog file");
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ParameterError("catalog file not found: " + p.string());
    return p;
  };
  source.related_file = resolve(require(node, "related_file"));
  if (auto it = node.find("popularity_file"); it != node.end()) source.popularity_file = resolve(*it);
  return source;
}

}  // namespace

std::size_t ExperimentConfig::cell_count() const {
  return recommenders.size() * depths.size() * widths.size() * policies.size() * capacities.size() *
         demands.size() * steps.size();
}

std::string_view to_string(EvaluationMode mode) {
  switch (mode) {
    case EvaluationMode::kAuto:
      return "auto";
    case EvaluationMode::kExact:
      return "exact";
    case EvaluationMode::kSample:
      return "sample";
  }
  return "?";
}

EvaluationMode parse_evaluation_mode(std::string_view text) {
  if (text == "auto") return EvaluationMode::kAuto;
  if (text == "exact") return EvaluationMode::kExact;
  if (text == "sample") return EvaluationMode::kSample;
  throw ParameterError("unknown evaluation mode '" + std::string(text) + "' (expected auto, exact or sample)");
}

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (!kTopLevelKeys.contains(k)) throw ParameterError(fmt::format("unknown config key \"{}\"", k));
  }

  ExperimentConfig c;
  c.source_text = std::string(json_text);
  try {
    const auto& seed = require(doc, "seed");
    if (!seed.is_number_unsigned()) throw ParameterError("\"seed\" must be a non-negative integer");
    c.seed = seed.get<std::uint64_t>();
    c.catalog = parse_catalog(require(doc, "catalog"), base_dir);

    if (auto it = doc.find("w_max"); it != doc.end()) c.width_cap = positive(*it, "w_max");
    if (auto it = doc.find("front_page"); it != doc.end()) c.front_page = positive(*it, "front_page");
    if (auto it = doc.find("N"); it != doc.end()) c.count = positive(*it, "N");
    if (auto it = doc.find("sessions"); it != doc.end()) c.sessions = positive(*it, "sessions");
    if (auto it = doc.find("workers"); it != doc.end()) c.workers = positive(*it, "workers");
    if (auto it = doc.find("evaluation"); it != doc.end()) {
      c.evaluation = parse_evaluation_mode(string_of(*it, "evaluation"));
    }
    if (auto it = doc.find("candidates"); it != doc.end()) {
      const auto s = string_of(*it, "candidates");
      if (s == "explored") {
        c.candidates = CandidateSet::kExplored;
      } else if (s == "catalog") {
        c.candidates = CandidateSet::kCatalog;
      } else {
        throw ParameterError("\"candidates\" must be \"explored\" or \"catalog\"");
      }
    }

    c.recommenders = sweep<RecommenderKind>(doc, "recommenders", [](const json& v) {
      return parse_recommender_kind(string_of(v, "recommenders"));
    });
    c.depths = sweep<std::size_t>(doc, "depth", [](const json& v) { return positive(v, "depth"); });
    c.widths = sweep<std::size_t>(doc, "width", [](const json& v) { return positive(v, "width"); });
    c.policies = sweep<PlacementMethod>(doc, "cache_policy", [](const json& v) {
      return parse_placement_method(string_of(v, "cache_policy"));
    });
    c.capacities =
        sweep<std::size_t>(doc, "capacity", [](const json& v) { return positive(v, "capacity"); });
    c.demands = sweep<DemandSpec>(doc, "demand",
                                  [](const json& v) { return DemandSpec::parse(string_of(v, "demand")); });
    c.steps = sweep<std::size_t>(doc, "K", [](const json& v) {
      const auto k = positive(v, "K");
      if (k < 2) throw ParameterError("\"K\" must be at least 2");
      return k;
    });
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config has a value of the wrong type: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace cabaret
