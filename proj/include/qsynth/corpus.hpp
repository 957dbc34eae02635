// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsynth {

enum class Language { java, python, pharo };

std::string_view to_string(Language lang) noexcept;
std::optional<Language> parse_language(std::string_view name) noexcept;

/// Ordered category names for one corpus language. The order fixes the
/// meaning of every bit in a label vector.
class CategorySchema {
 public:
  /// Throws ConfigError on an empty or duplicated category list.
  CategorySchema(Language language, std::vector<std::string> categories);

  /// Built-in challenge schemas: 7 Java, 5 Python, 6 Pharo categories.
  static CategorySchema builtin(Language language);

  Language language() const noexcept { return language_; }
  const std::vector<std::string>& categories() const noexcept { return categories_; }
  std::size_t width() const noexcept { return categories_.size(); }

  friend bool operator==(const CategorySchema&, const CategorySchema&) = default;

 private:
  Language language_;
  std::vector<std::string> categories_;
};

using LabelVector = std::vector<std::uint8_t>;

struct LabeledComment {
  std::string id;
  Language language = Language::java;
  std::string text;
  LabelVector labels;

  friend bool operator==(const LabeledComment&, const LabeledComment&) = default;
};

enum class Split { train, test };

std::string_view to_string(Split split) noexcept;

struct Dataset {
  CategorySchema schema;
  std::vector<LabeledComment> items;
  Split split = Split::train;

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct CategoryCount {
  std::string category;
  std::size_t positives = 0;
  double ratio = 0.0;
};

struct ClassStats {
  std::vector<CategoryCount> categories;
  std::size_t total = 0;
};

enum class FileFormat { csv, jsonl };

/// Picks the format from the file extension (.csv, .jsonl, .json).
std::optional<FileFormat> format_from_path(const std::filesystem::path& path);

/// Checks every LabeledComment invariant against the schema. Throws
/// DataError naming the first offending item (1-based).
void validate(const Dataset& d);

/// Reads a dataset in file order. CSV files need the header
/// `id,text,<cat1>,...,<catN>` in schema order; JSONL records carry `id`,
/// `text` and an integer `labels` array. Records are never repaired.
Dataset load_dataset(const std::filesystem::path& path, FileFormat format, const CategorySchema& schema,
                     Split split = Split::train);

void write_dataset(const Dataset& d, const std::filesystem::path& path, FileFormat format);

ClassStats class_stats(const Dataset& d);

}  // namespace qsynth
