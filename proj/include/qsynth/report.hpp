// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qsynth/corpus.hpp"
#include "qsynth/scoring.hpp"
#include "qsynth/selection.hpp"

namespace qsynth {

struct LengthQuality {
  std::size_t tokens = 0;
  std::size_t count = 0;
  double mean_quality = 0.0;
};

struct PoolReport {
  static constexpr double bin_width = 0.05;
  static constexpr std::size_t bins = 20;

  std::size_t size = 0;
  std::size_t degraded = 0;
  double mean_quality = 0.0;
  std::vector<std::size_t> quality_histogram;      ///< bins of width 0.05; 1.0 falls in the last bin
  std::map<std::size_t, std::size_t> length_histogram;  ///< token count -> samples
  std::vector<LengthQuality> length_quality;       ///< ascending token count
};

struct CategoryShift {
  std::string category;
  double ratio_before = 0.0;
  double ratio_after = 0.0;
  std::size_t added = 0;
  std::optional<std::size_t> target;
};

struct ThresholdReport {
  Strategy strategy = Strategy::oversampling;
  double threshold = 0.0;
  std::size_t selected = 0;
  std::size_t degraded_selected = 0;
  double synthetic_fraction = 0.0;
  std::vector<CategoryShift> categories;
  std::string dataset_file;
};

struct RunReport {
  std::string language;
  std::string fingerprint;
  std::size_t originals = 0;
  PoolReport pool;
  std::vector<ThresholdReport> thresholds;
};

std::size_t quality_bin(double q);

/// Histograms and the per-length quality table. Token counts come from
/// the library tokenizer applied to each synthetic text.
PoolReport report_stats(const ScoredPool& pool);

ThresholdReport threshold_report(const Dataset& original, const SelectionResult& result);

nlohmann::ordered_json to_json(const ClassStats& stats);
nlohmann::ordered_json to_json(const SelectionResult& result);
nlohmann::ordered_json to_json(const RunReport& report);

/// Aligned plain-text tables.
std::string render_text(const ClassStats& stats);
std::string render_text(const RunReport& report);

}  // namespace qsynth
