// SPDX-License-Identifier: Apache-2.0
#include "qsynth/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "qsynth/error.hpp"

namespace qsynth {

namespace {

double quality_of(const SyntheticSample& s) {
  if (!s.quality) throw DataError(0, "sample " + synthetic_id(s) + " has no quality score");
  return *s.quality;
}

void check_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("quality threshold must lie in [0, 1]");
}

SelectionResult finish(SelectionResult r, const Dataset& original, std::vector<std::size_t> added,
                       const std::optional<Targets>& targets) {
  const ClassStats before = class_stats(original);
  r.merged_stats.total = original.size() + r.selected.size();
  for (std::size_t c = 0; c < original.schema.width(); ++c) {
    const std::size_t orig = before.categories[c].positives;
    r.categories.push_back({before.categories[c].category, orig, added[c],
                            targets ? std::optional<std::size_t>((*targets)[c]) : std::nullopt});
    const std::size_t positives = orig + added[c];
    r.merged_stats.categories.push_back({before.categories[c].category, positives,
                                         static_cast<double>(positives) / static_cast<double>(r.merged_stats.total)});
  }
  r.synthetic_fraction = static_cast<double>(r.selected.size()) / static_cast<double>(r.merged_stats.total);
  r.degraded_selected = static_cast<std::size_t>(
      std::count_if(r.selected.begin(), r.selected.end(), [](const SyntheticSample& s) { return s.degraded; }));
  return r;
}

void check_labels(const ScoredPool& pool, const Dataset& original) {
  for (std::size_t i = 0; i < pool.samples.size(); ++i) {
    if (pool.samples[i].labels.size() != original.schema.width())
      throw DataError(i + 1, "sample label width does not match the dataset schema");
  }
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  return s == Strategy::oversampling ? "oversampling" : "augmentation";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  if (name == "oversampling") return Strategy::oversampling;
  if (name == "augmentation") return Strategy::augmentation;
  return std::nullopt;
}

std::string synthetic_id(const SyntheticSample& s) { return s.source_id + "#" + std::to_string(s.variant_index); }

Targets compute_targets(const ClassStats& stats, double cap_multiplier) {
  if (!(cap_multiplier > 0.0)) throw ConfigError("cap multiplier must be positive");
  std::size_t majority = 0;
  for (const auto& c : stats.categories) majority = std::max(majority, c.positives);
  Targets targets;
  for (const auto& c : stats.categories) {
    const auto capped = static_cast<std::size_t>(std::floor(cap_multiplier * static_cast<double>(c.positives)));
    targets.push_back(std::max(c.positives, std::min(majority, capped)));
  }
  return targets;
}

bool quality_order(const SyntheticSample& a, const SyntheticSample& b) {
  const double qa = quality_of(a), qb = quality_of(b);
  if (qa != qb) return qa > qb;
  if (a.source_id != b.source_id) return a.source_id < b.source_id;
  return a.variant_index < b.variant_index;
}

SelectionResult select_oversampling(const ScoredPool& pool, const Dataset& original, const SelectionPolicy& policy) {
  if (policy.strategy != Strategy::oversampling) throw ConfigError("policy strategy is not oversampling");
  if (!policy.targets) throw ConfigError("oversampling needs per-category targets");
  check_threshold(policy.threshold);
  check_labels(pool, original);
  const std::size_t width = original.schema.width();
  const Targets& targets = *policy.targets;
  if (targets.size() != width) throw ConfigError("target count does not match the schema width");

  const ClassStats before = class_stats(original);
  for (std::size_t c = 0; c < width; ++c) {
    if (targets[c] < before.categories[c].positives)
      throw ConfigError("target for '" + before.categories[c].category + "' is below its current positive count");
  }

  // Eligible samples, best first.
  std::vector<std::size_t> ranked;
  for (std::size_t i = 0; i < pool.samples.size(); ++i) {
    if (quality_of(pool.samples[i]) >= policy.threshold) ranked.push_back(i);
  }
  std::sort(ranked.begin(), ranked.end(),
            [&](std::size_t a, std::size_t b) { return quality_order(pool.samples[a], pool.samples[b]); });

  std::vector<std::size_t> order(width);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return before.categories[a].positives < before.categories[b].positives;
  });

  SelectionResult r{Strategy::oversampling, policy.threshold, {}, {}, {}, 0.0, 0};
  std::vector<std::size_t> added(width, 0);
  std::vector<bool> taken(pool.samples.size(), false);
  for (const std::size_t c : order) {
    for (const std::size_t i : ranked) {
      if (before.categories[c].positives + added[c] >= targets[c]) break;
      const auto& s = pool.samples[i];
      if (taken[i] || !s.labels[c]) continue;
      taken[i] = true;
      for (std::size_t j = 0; j < width; ++j) added[j] += s.labels[j];
      r.selected.push_back(s);
    }
  }
  return finish(std::move(r), original, std::move(added), policy.targets);
}

SelectionResult select_augmentation(const ScoredPool& pool, const Dataset& original, const SelectionPolicy& policy) {
  if (policy.strategy != Strategy::augmentation) throw ConfigError("policy strategy is not augmentation");
  if (policy.targets) throw ConfigError("augmentation does not take per-category targets");
  check_threshold(policy.threshold);
  check_labels(pool, original);
  SelectionResult r{Strategy::augmentation, policy.threshold, {}, {}, {}, 0.0, 0};
  std::vector<std::size_t> added(original.schema.width(), 0);
  for (const auto& s : pool.samples) {
    if (quality_of(s) < policy.threshold) continue;
    for (std::size_t j = 0; j < added.size(); ++j) added[j] += s.labels[j];
    r.selected.push_back(s);
  }
  return finish(std::move(r), original, std::move(added), std::nullopt);
}

SelectionResult select(const ScoredPool& pool, const Dataset& original, const SelectionPolicy& policy) {
  return policy.strategy == Strategy::oversampling ? select_oversampling(pool, original, policy)
                                                   : select_augmentation(pool, original, policy);
}

Dataset merge(const Dataset& original, const SelectionResult& result) {
  Dataset out = original;
  std::unordered_set<std::string> ids;
  for (const auto& item : original.items) ids.insert(item.id);

  std::vector<const SyntheticSample*> sorted;
  for (const auto& s : result.selected) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](const SyntheticSample* a, const SyntheticSample* b) {
    if (a->source_id != b->source_id) return a->source_id < b->source_id;
    return a->variant_index < b->variant_index;
  });

  for (const SyntheticSample* s : sorted) {
    LabeledComment item{synthetic_id(*s), original.schema.language(), s->text, s->labels};
    if (item.labels.size() != original.schema.width())
      throw DataError(out.items.size() + 1, "selected sample " + item.id + " has the wrong label width");
    if (!ids.insert(item.id).second) throw DataError(out.items.size() + 1, "id collision on '" + item.id + "'");
    out.items.push_back(std::move(item));
  }
  return out;
}

}  // namespace qsynth
