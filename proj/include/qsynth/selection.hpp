// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsynth/corpus.hpp"
#include "qsynth/scoring.hpp"

namespace qsynth {

enum class Strategy { oversampling, augmentation };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Positive-count target per category index.
using Targets = std::vector<std::size_t>;

struct SelectionPolicy {
  Strategy strategy = Strategy::oversampling;
  double threshold = 0.9;
  std::optional<Targets> targets;  ///< required for oversampling, forbidden for augmentation
};

struct CategoryOutcome {
  std::string category;
  std::size_t original = 0;  ///< positives in the source dataset
  std::size_t added = 0;     ///< positives contributed by selected samples
  std::optional<std::size_t> target;

  bool met() const { return !target || original + added >= *target; }
};

struct SelectionResult {
  Strategy strategy = Strategy::oversampling;
  double threshold = 0.0;
  std::vector<SyntheticSample> selected;  ///< in selection order
  std::vector<CategoryOutcome> categories;
  ClassStats merged_stats;                ///< statistics of originals plus selected
  double synthetic_fraction = 0.0;        ///< |selected| / (|originals| + |selected|)
  std::size_t degraded_selected = 0;
};

/// N_c = min(largest positive count, floor(cap · count_c)), never below count_c.
Targets compute_targets(const ClassStats& stats, double cap_multiplier = 10.0);

/// Strict total order used for selection: quality descending, then source
/// id, then variant index.
bool quality_order(const SyntheticSample& a, const SyntheticSample& b);

/// Fills per-category deficits from the pool, rarest category first. A
/// picked sample counts toward every category it is positive for; a
/// category stops when its deficit closes or its eligible samples run out.
SelectionResult select_oversampling(const ScoredPool& pool, const Dataset& original, const SelectionPolicy& policy);

/// Every sample with quality >= threshold, in pool order.
SelectionResult select_augmentation(const ScoredPool& pool, const Dataset& original, const SelectionPolicy& policy);

SelectionResult select(const ScoredPool& pool, const Dataset& original, const SelectionPolicy& policy);

/// Originals first, then selected samples sorted by (source id, variant
/// index) with ids "<source_id>#<variant_index>". Throws DataError on an
/// id collision or a label-width mismatch.
Dataset merge(const Dataset& original, const SelectionResult& result);

std::string synthetic_id(const SyntheticSample& s);

}  // namespace qsynth
