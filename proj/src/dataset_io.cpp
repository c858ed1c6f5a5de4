#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

#include "cabaret/content_graph.hpp"
#include "cabaret/error.hpp"

namespace cabaret {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("short write to '" + path.string() + "'");
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Calls fn(line_number, line) for every line, without the terminator.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    fn(++line_no, text.substr(pos, end - pos));
    pos = end + 1;
  }
}

void parse_related_lines(std::string_view text, CatalogBuilder& builder) {
  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    const auto line = trim(raw);
    if (line.empty()) return;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object()) throw ParseError("record must be a JSON object", line_no);
    auto id_it = rec.find("id");
    auto rel_it = rec.find("related");
    if (id_it == rec.end() || !id_it->is_string()) {
      throw ParseError("record needs a string \"id\"", line_no);
    }
    if (rel_it == rec.end() || !rel_it->is_array()) {
      throw ParseError("record needs a \"related\" array", line_no);
    }
    std::vector<std::string> related;
    related.reserve(rel_it->size());
    for (const auto& r : *rel_it) {
      if (!r.is_string()) throw ParseError("\"related\" entries must be strings", line_no);
      related.push_back(r.get<std::string>());
    }
    try {
      builder.add_record(id_it->get<std::string>(), std::move(related));
    } catch (const DuplicateDefinitionError& e) {
      throw DuplicateDefinitionError(e.what(), line_no);
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), line_no);
    }
  });
}

std::string unquote_csv(std::string_view field, std::size_t line_no) {
  field = trim(field);
  if (field.size() < 2 || field.front() != '"') return std::string(field);
  if (field.back() != '"') throw ParseError("unterminated quoted field", line_no);
  std::string out;
  for (std::size_t i = 1; i + 1 < field.size(); ++i) {
    if (field[i] == '"') {
      if (i + 2 < field.size() && field[i + 1] == '"') {
        out.push_back('"');
        ++i;
      } else {
        throw ParseError("stray quote in field", line_no);
      }
    } else {
      out.push_back(field[i]);
    }
  }
  return out;
}

std::string quote_csv(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void parse_popularity_csv(std::string_view text, CatalogBuilder& builder) {
  bool header_seen = false;
  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    const auto line = trim(raw);
    if (line.empty()) return;
    if (!header_seen) {
      if (line != "id,weight") throw ParseError("popularity header must be 'id,weight'", line_no);
      header_seen = true;
      return;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string_view::npos) throw ParseError("expected 'id,weight'", line_no);
    auto id = unquote_csv(line.substr(0, comma), line_no);
    const auto weight_text = trim(line.substr(comma + 1));
    double weight = 0.0;
    auto [ptr, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
    if (ec != std::errc() || ptr != weight_text.data() + weight_text.size()) {
      throw ParseError("weight is not a decimal number: '" + std::string(weight_text) + "'", line_no);
    }
    if (id.empty()) throw ParseError("empty id", line_no);
    try {
      builder.set_popularity(std::move(id), weight);
    } catch (const DuplicateDefinitionError& e) {
      throw DuplicateDefinitionError(e.what(), line_no);
    } catch (const ParameterError& e) {
      throw ParseError(e.what(), line_no);
    }
  });
  if (!header_seen) throw ParseError("popularity file is empty", 0);
}

}  // namespace

Catalog load_dataset_from_strings(std::string_view related_text,
                                  std::optional<std::string_view> popularity_text) {
  CatalogBuilder builder;
  parse_related_lines(related_text, builder);
  if (popularity_text) parse_popularity_csv(*popularity_text, builder);
  return std::move(builder).build();
}

Catalog load_dataset(const std::filesystem::path& related_file,
                     const std::optional<std::filesystem::path>& popularity_file) {
  const auto related = read_file(related_file);
  if (popularity_file) {
    const auto popularity = read_file(*popularity_file);
    return load_dataset_from_strings(related, popularity);
  }
  return load_dataset_from_strings(related);
}

std::string canonical_related_lines(const Catalog& catalog) {
  std::string out;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const ContentId id(static_cast<ContentId::value_type>(i));
    if (!catalog.defined(id)) continue;
    nlohmann::ordered_json rec;
    rec["id"] = std::string(catalog.name(id));
    auto related = nlohmann::ordered_json::array();
    for (ContentId r : catalog.related(id)) related.push_back(std::string(catalog.name(r)));
    rec["related"] = std::move(related);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::string canonical_popularity_csv(const Catalog& catalog) {
  std::string out = "id,weight\n";
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const ContentId id(static_cast<ContentId::value_type>(i));
    out += fmt::format("{},{}\n", quote_csv(catalog.name(id)), catalog.popularity(id));
  }
  return out;
}

void save_dataset(const Catalog& catalog, const std::filesystem::path& related_file,
                  const std::optional<std::filesystem::path>& popularity_file) {
  write_file(related_file, canonical_related_lines(catalog));
  if (popularity_file) write_file(*popularity_file, canonical_popularity_csv(catalog));
}

}  // namespace cabaret
