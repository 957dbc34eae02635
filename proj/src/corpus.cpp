// SPDX-License-Identifier: Apache-2.0
#include "qsynth/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <unordered_set>

#include "csv.hpp"
#include "qsynth/error.hpp"
#include "qsynth/text.hpp"

namespace qsynth {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Checks one item; `index` is the 1-based record number used in messages.
void check_item(const LabeledComment& item, const CategorySchema& schema, std::size_t index) {
  if (item.id.empty()) throw DataError(index, "empty id");
  if (item.language != schema.language())
    throw DataError(index, "language " + std::string(to_string(item.language)) + " does not match schema " +
                               std::string(to_string(schema.language())));
  if (is_blank(item.text)) throw DataError(index, "empty text");
  if (!is_valid_utf8(item.text) || !is_valid_utf8(item.id)) throw DataError(index, "invalid UTF-8");
  if (item.labels.size() != schema.width())
    throw DataError(index, "label-width mismatch: expected " + std::to_string(schema.width()) + ", got " +
                               std::to_string(item.labels.size()));
  bool any = false;
  for (auto bit : item.labels) {
    if (bit > 1) throw DataError(index, "label value " + std::to_string(bit) + " is not 0/1");
    any = any || bit == 1;
  }
  if (!any) throw DataError(index, "all-zero label vector");
}

std::uint8_t parse_bit(std::string_view field, std::size_t index, const std::string& category) {
  field = trim(field);
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw DataError(index, "label '" + category + "' is not 0/1: '" + std::string(field) + "'");
}

Dataset load_csv(std::istream& in, const CategorySchema& schema, Split split) {
  csv::Reader reader(in);
  Dataset d{schema, {}, split};
  std::optional<std::vector<std::string>> row;
  try {
    row = reader.next();
  } catch (const std::runtime_error& e) {
    throw DataError(0, e.what());
  }
  if (!row) throw DataError(0, "missing header row");
  const auto& header = *row;
  if (header.size() != schema.width() + 2)
    throw DataError(0, "label-width mismatch: header has " + std::to_string(header.size()) + " columns, schema needs " +
                           std::to_string(schema.width() + 2));
  if (trim(header[0]) != "id" || trim(header[1]) != "text")
    throw DataError(0, "header must start with 'id,text'");
  for (std::size_t c = 0; c < schema.width(); ++c) {
    if (trim(header[c + 2]) != schema.categories()[c])
      throw DataError(0, "header column '" + header[c + 2] + "' does not match category '" + schema.categories()[c] +
                             "'");
  }

  std::unordered_set<std::string> seen;
  for (std::size_t index = 1;; ++index) {
    try {
      row = reader.next();
    } catch (const std::runtime_error& e) {
      throw DataError(index, e.what());
    }
    if (!row) break;
    auto& fields = *row;
    if (fields.size() != schema.width() + 2)
      throw DataError(index, "label-width mismatch: expected " + std::to_string(schema.width() + 2) + " fields, got " +
                                 std::to_string(fields.size()) + " (line " + std::to_string(reader.line()) + ")");
    LabeledComment item{std::move(fields[0]), schema.language(), std::move(fields[1]), {}};
    item.labels.reserve(schema.width());
    for (std::size_t c = 0; c < schema.width(); ++c)
      item.labels.push_back(parse_bit(fields[c + 2], index, schema.categories()[c]));
    check_item(item, schema, index);
    if (!seen.insert(item.id).second) throw DataError(index, "duplicate id '" + item.id + "'");
    d.items.push_back(std::move(item));
  }
  return d;
}

Dataset load_jsonl(std::istream& in, const CategorySchema& schema, Split split) {
  Dataset d{schema, {}, split};
  std::unordered_set<std::string> seen;
  std::string line;
  for (std::size_t index = 1; std::getline(in, line); ++index) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(index, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw DataError(index, "record is not an object");
    for (const char* key : {"id", "text", "labels"}) {
      if (!record.contains(key)) throw DataError(index, std::string("missing field '") + key + "'");
    }
    if (!record["id"].is_string() || !record["text"].is_string())
      throw DataError(index, "'id' and 'text' must be strings");
    const auto& labels = record["labels"];
    if (!labels.is_array()) throw DataError(index, "'labels' must be an array");
    LabeledComment item{record["id"].get<std::string>(), schema.language(), record["text"].get<std::string>(), {}};
    for (const auto& v : labels) {
      if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
        throw DataError(index, "label value " + v.dump() + " is not 0/1");
      item.labels.push_back(static_cast<std::uint8_t>(v.get<int>()));
    }
    check_item(item, schema, index);
    if (!seen.insert(item.id).second) throw DataError(index, "duplicate id '" + item.id + "'");
    d.items.push_back(std::move(item));
  }
  return d;
}

}  // namespace

std::string_view to_string(Language lang) noexcept {
  switch (lang) {
    case Language::java: return "java";
    case Language::python: return "python";
    case Language::pharo: return "pharo";
  }
  return "unknown";
}

std::optional<Language> parse_language(std::string_view name) noexcept {
  if (name == "java") return Language::java;
  if (name == "python") return Language::python;
  if (name == "pharo") return Language::pharo;
  return std::nullopt;
}

std::string_view to_string(Split split) noexcept { return split == Split::train ? "train" : "test"; }

CategorySchema::CategorySchema(Language language, std::vector<std::string> categories)
    : language_(language), categories_(std::move(categories)) {
  if (categories_.empty()) throw ConfigError("category schema needs at least one category");
  std::set<std::string_view> unique(categories_.begin(), categories_.end());
  if (unique.size() != categories_.size()) throw ConfigError("duplicate category name in schema");
}

CategorySchema CategorySchema::builtin(Language language) {
  switch (language) {
    case Language::java:
      return {language, {"summary", "ownership", "expand", "usage", "pointer", "deprecation", "rational"}};
    case Language::python:
      return {language, {"usage", "parameters", "development_notes", "expand", "summary"}};
    case Language::pharo:
      return {language,
              {"key_implementation_points", "example", "responsibilities", "intent", "key_messages", "collaborators"}};
  }
  throw ConfigError("unknown language");
}

std::optional<FileFormat> format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return FileFormat::csv;
  if (ext == ".jsonl" || ext == ".json") return FileFormat::jsonl;
  return std::nullopt;
}

void validate(const Dataset& d) {
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < d.items.size(); ++i) {
    check_item(d.items[i], d.schema, i + 1);
    if (!seen.insert(d.items[i].id).second) throw DataError(i + 1, "duplicate id '" + d.items[i].id + "'");
  }
}

Dataset load_dataset(const std::filesystem::path& path, FileFormat format, const CategorySchema& schema,
                     Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return format == FileFormat::csv ? load_csv(in, schema, split) : load_jsonl(in, schema, split);
}

void write_dataset(const Dataset& d, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");

  if (format == FileFormat::csv) {
    std::vector<std::string> row{"id", "text"};
    row.insert(row.end(), d.schema.categories().begin(), d.schema.categories().end());
    csv::write_row(out, row);
    for (const auto& item : d.items) {
      row.assign({item.id, item.text});
      for (auto bit : item.labels) row.push_back(bit ? "1" : "0");
      csv::write_row(out, row);
    }
  } else {
    for (const auto& item : d.items) {
      nlohmann::ordered_json record;
      record["id"] = item.id;
      record["text"] = item.text;
      record["labels"] = item.labels;
      out << record.dump() << '\n';
    }
  }
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

ClassStats class_stats(const Dataset& d) {
  if (d.empty()) throw DataError(0, "class statistics need a non-empty dataset");
  ClassStats stats;
  stats.total = d.size();
  for (std::size_t c = 0; c < d.schema.width(); ++c) {
    std::size_t count = 0;
    for (const auto& item : d.items) count += item.labels[c];
    stats.categories.push_back(
        {d.schema.categories()[c], count, static_cast<double>(count) / static_cast<double>(stats.total)});
  }
  return stats;
}

}  // namespace qsynth
