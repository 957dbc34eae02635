// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "qsynth/error.hpp"
#include "qsynth/random.hpp"
#include "qsynth/selection.hpp"

namespace qsynth {
namespace {

Dataset make_dataset(const std::vector<LabelVector>& labels) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < labels.front().size(); ++c) names.push_back("c" + std::to_string(c));
  Dataset d{CategorySchema(Language::python, names), {}, Split::train};
  for (std::size_t i = 0; i < labels.size(); ++i)
    d.items.push_back({"o" + std::to_string(i), Language::python, "original " + std::to_string(i), labels[i]});
  return d;
}

SyntheticSample sample(std::string source, std::size_t variant, double q, LabelVector labels) {
  return {std::move(source), variant, "text", 0.5, q, std::move(labels), false};
}

std::set<std::string> ids(const SelectionResult& r) {
  std::set<std::string> out;
  for (const auto& s : r.selected) out.insert(synthetic_id(s));
  return out;
}

// Reference: rarest category first, repeatedly pick the single best
// eligible sample by linear scan until the target is met.
std::vector<std::string> reference_oversampling(const std::vector<SyntheticSample>& pool,
                                                std::vector<std::size_t> counts, const Targets& targets,
                                                double threshold) {
  const std::size_t width = counts.size();
  std::vector<std::size_t> order(width);
  for (std::size_t c = 0; c < width; ++c) order[c] = c;
  const auto original = counts;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return original[a] < original[b]; });

  std::vector<bool> used(pool.size(), false);
  std::vector<std::string> picked;
  for (auto c : order) {
    while (counts[c] < targets[c]) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& s = pool[i];
        if (used[i] || !s.labels[c] || *s.quality < threshold) continue;
        if (!best) {
          best = i;
          continue;
        }
        const auto& b = pool[*best];
        const bool better = *s.quality > *b.quality ||
                            (*s.quality == *b.quality &&
                             std::tie(s.source_id, s.variant_index) < std::tie(b.source_id, b.variant_index));
        if (better) best = i;
      }
      if (!best) break;
      used[*best] = true;
      for (std::size_t j = 0; j < width; ++j) counts[j] += pool[*best].labels[j];
      picked.push_back(synthetic_id(pool[*best]));
    }
  }
  return picked;
}

TEST(ComputeTargetsTest, MajorityIsTheCeiling) {
  ClassStats s{{{"A", 100, 0}, {"B", 20, 0}}, 120};
  EXPECT_EQ(compute_targets(s, 10), (Targets{100, 100}));
}

TEST(ComputeTargetsTest, CapBinds) {
  ClassStats s{{{"A", 100, 0}, {"B", 5, 0}}, 105};
  EXPECT_EQ(compute_targets(s, 10), (Targets{100, 50}));
}

TEST(ComputeTargetsTest, SingleCategoryIsNoOp) {
  ClassStats s{{{"A", 37, 0}}, 37};
  EXPECT_EQ(compute_targets(s, 10), (Targets{37}));
}

TEST(ComputeTargetsTest, NeverBelowCurrentCount) {
  ClassStats s{{{"A", 100, 0}, {"B", 5, 0}}, 105};
  EXPECT_EQ(compute_targets(s, 0.5), (Targets{100, 5}));
  EXPECT_THROW(compute_targets(s, 0.0), ConfigError);
}

// Category B (index 1) needs 2 more positives and has 3 eligible samples.
TEST(SelectOversamplingTest, TakesHighestQualityWithinDeficit) {
  const Dataset d = make_dataset({{1, 0}, {1, 0}, {1, 0}, {1, 1}});
  const ScoredPool pool{{sample("o0", 0, 0.96, {0, 1}), sample("o1", 0, 0.99, {0, 1}), sample("o2", 0, 0.97, {0, 1}),
                         sample("o3", 0, 0.995, {1, 0})},
                        ""};
  const SelectionPolicy policy{Strategy::oversampling, 0.9, Targets{4, 3}};
  const auto r = select_oversampling(pool, d, policy);

  // Exhaustive check: among all 2-subsets of B-eligible samples, the
  // selection maximises total quality.
  std::vector<std::size_t> eligible{0, 1, 2};
  double best = -1;
  std::set<std::string> best_ids;
  for (std::size_t i = 0; i < eligible.size(); ++i)
    for (std::size_t j = i + 1; j < eligible.size(); ++j) {
      const double total = *pool.samples[i].quality + *pool.samples[j].quality;
      if (total > best) {
        best = total;
        best_ids = {synthetic_id(pool.samples[i]), synthetic_id(pool.samples[j])};
      }
    }
  EXPECT_EQ(ids(r), best_ids);
  EXPECT_EQ(r.categories[1].added, 2u);
  EXPECT_TRUE(r.categories[1].met());
}

TEST(SelectOversamplingTest, ThresholdAboveEveryScoreSelectsNothing) {
  const Dataset d = make_dataset({{1, 0}, {1, 0}, {0, 1}});
  const ScoredPool pool{{sample("o2", 0, 0.8, {0, 1}), sample("o2", 1, 0.85, {0, 1})}, ""};
  const auto r = select_oversampling(pool, d, {Strategy::oversampling, 0.9, Targets{2, 2}});
  EXPECT_TRUE(r.selected.empty());
  EXPECT_EQ(r.synthetic_fraction, 0.0);
  EXPECT_EQ(merge(d, r), d);
  EXPECT_FALSE(r.categories[1].met());
}

TEST(SelectOversamplingTest, ZeroThresholdMeetsEveryDeficit) {
  const Dataset d = make_dataset({{1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  std::vector<SyntheticSample> samples;
  for (std::size_t v = 0; v < 10; ++v) {
    samples.push_back(sample("o4", v, 0.01 * v, {0, 1, 0}));
    samples.push_back(sample("o5", v, 0.02 * v, {0, 0, 1}));
  }
  const auto r = select_oversampling({samples, ""}, d, {Strategy::oversampling, 0.0, Targets{4, 4, 4}});
  for (const auto& c : r.categories) EXPECT_TRUE(c.met()) << c.category;
  EXPECT_EQ(r.selected.size(), 6u);
}

TEST(SelectOversamplingTest, MultiLabelSampleCountsForAllCategories) {
  // c1 and c2 both need one; one sample covers both.
  const Dataset d = make_dataset({{1, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 0, 1}});
  const ScoredPool pool{{sample("o2", 0, 0.99, {0, 1, 1}), sample("o3", 0, 0.98, {0, 0, 1}),
                         sample("o2", 1, 0.97, {0, 1, 0})},
                        ""};
  const auto r = select_oversampling(pool, d, {Strategy::oversampling, 0.5, Targets{4, 2, 2}});
  EXPECT_EQ(ids(r), (std::set<std::string>{"o2#0"}));
  EXPECT_EQ(r.categories[1].added, 1u);
  EXPECT_EQ(r.categories[2].added, 1u);
}

TEST(SelectOversamplingTest, RequiresTargets) {
  const Dataset d = make_dataset({{1, 0}, {0, 1}});
  EXPECT_THROW(select_oversampling({{}, ""}, d, {Strategy::oversampling, 0.5, std::nullopt}), ConfigError);
  EXPECT_THROW(select_oversampling({{}, ""}, d, {Strategy::oversampling, 0.5, Targets{0, 1}}), ConfigError);
}

struct RandomCase {
  Dataset original;
  ScoredPool pool;
  Targets targets;
};

RandomCase random_case(Rng& rng) {
  const std::size_t width = 1 + rng.below(3);
  std::vector<LabelVector> labels;
  for (std::size_t i = 0, n = 2 + rng.below(10); i < n; ++i) {
    LabelVector v(width, 0);
    v[rng.below(width)] = 1;
    if (rng.below(3) == 0) v[rng.below(width)] = 1;
    labels.push_back(v);
  }
  RandomCase rc{make_dataset(labels), {}, {}};
  const std::size_t pool_size = rng.below(21);
  for (std::size_t i = 0; i < pool_size; ++i) {
    const auto& src = rc.original.items[rng.below(rc.original.size())];
    // Coarse quality grid to force ties.
    rc.pool.samples.push_back(sample(src.id, i, rng.below(11) / 10.0, src.labels));
  }
  rc.targets = compute_targets(class_stats(rc.original), 1.0 + rng.below(4));
  return rc;
}

TEST(SelectOversamplingTest, MatchesReferenceOnRandomPools) {
  Rng rng(2718);
  for (int trial = 0; trial < 500; ++trial) {
    const auto rc = random_case(rng);
    const double threshold = rng.below(11) / 10.0;
    const auto r = select_oversampling(rc.pool, rc.original, {Strategy::oversampling, threshold, rc.targets});
    std::vector<std::size_t> counts;
    for (const auto& c : class_stats(rc.original).categories) counts.push_back(c.positives);
    std::vector<std::string> got;
    for (const auto& s : r.selected) got.push_back(synthetic_id(s));
    EXPECT_EQ(got, reference_oversampling(rc.pool.samples, counts, rc.targets, threshold)) << "trial " << trial;
  }
}

TEST(SelectOversamplingTest, InvariantsOnRandomPools) {
  Rng rng(161);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rc = random_case(rng);
    const double threshold = rng.below(11) / 10.0;
    const auto r = select_oversampling(rc.pool, rc.original, {Strategy::oversampling, threshold, rc.targets});

    std::vector<std::size_t> counts;
    for (const auto& c : class_stats(rc.original).categories) counts.push_back(c.positives);
    std::set<std::string> seen;
    for (const auto& s : r.selected) {
      EXPECT_GE(*s.quality, threshold);
      EXPECT_TRUE(seen.insert(synthetic_id(s)).second);
      // At pick time some positive category still had a deficit.
      bool needed = false;
      for (std::size_t c = 0; c < counts.size(); ++c) needed = needed || (s.labels[c] && counts[c] < rc.targets[c]);
      EXPECT_TRUE(needed) << "trial " << trial << " picked " << synthetic_id(s);
      for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += s.labels[c];
    }
    // Deterministic.
    const auto again = select_oversampling(rc.pool, rc.original, {Strategy::oversampling, threshold, rc.targets});
    EXPECT_EQ(ids(again), ids(r));
  }
}

// With single-label samples every category fills independently, so the
// count can only shrink as the threshold rises.
TEST(SelectOversamplingTest, SelectedCountMonotoneForSingleLabelPools) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto rc = random_case(rng);
    for (auto& s : rc.pool.samples) {
      const auto first = std::find(s.labels.begin(), s.labels.end(), 1) - s.labels.begin();
      std::fill(s.labels.begin(), s.labels.end(), 0);
      s.labels[first] = 1;
    }
    std::size_t previous = SIZE_MAX;
    for (double t : {0.0, 0.3, 0.5, 0.7, 0.8, 0.9, 0.925, 0.95, 0.975, 1.0}) {
      const auto r = select_oversampling(rc.pool, rc.original, {Strategy::oversampling, t, rc.targets});
      EXPECT_LE(r.selected.size(), previous);
      previous = r.selected.size();
    }
  }
}

// A low-q sample positive for every category can close several deficits
// at once and displace two better single-label picks.
TEST(SelectOversamplingTest, MultiLabelSampleCanShrinkLowThresholdSelection) {
  const Dataset d = make_dataset({{1, 1, 1}, {0, 1, 1}});
  const ScoredPool pool{{sample("o0", 0, 0.9, {1, 0, 0}), sample("o0", 1, 0.9, {0, 1, 0}),
                         sample("o0", 2, 0.9, {0, 0, 1}), sample("o1", 0, 0.5, {1, 1, 1})},
                        ""};
  const Targets targets{3, 3, 3};
  const auto high = select_oversampling(pool, d, {Strategy::oversampling, 0.8, targets});
  const auto low = select_oversampling(pool, d, {Strategy::oversampling, 0.4, targets});
  EXPECT_EQ(ids(high), (std::set<std::string>{"o0#0", "o0#1", "o0#2"}));
  EXPECT_EQ(ids(low), (std::set<std::string>{"o0#0", "o1#0"}));
}

TEST(SelectAugmentationTest, FilterSemantics) {
  const Dataset d = make_dataset({{1, 0}, {0, 1}});
  const ScoredPool pool{{sample("o0", 0, 0.99, {1, 0}), sample("o0", 1, 0.9, {1, 0}), sample("o1", 0, 0.6, {0, 1})},
                        ""};
  const auto r = select_augmentation(pool, d, {Strategy::augmentation, 0.8, std::nullopt});
  EXPECT_EQ(ids(r), (std::set<std::string>{"o0#0", "o0#1"}));
  EXPECT_DOUBLE_EQ(r.synthetic_fraction, 2.0 / 4.0);
  EXPECT_TRUE(select_augmentation({{}, ""}, d, {Strategy::augmentation, 0.8, std::nullopt}).selected.empty());
  EXPECT_THROW(select_augmentation(pool, d, {Strategy::augmentation, 0.8, Targets{1, 1}}), ConfigError);
}

TEST(SelectAugmentationTest, NestedAsThresholdRises) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rc = random_case(rng);
    std::set<std::string> previous;
    bool first = true;
    for (double t : {0.7, 0.8, 0.9, 0.925, 0.95, 0.975}) {
      const auto current = ids(select_augmentation(rc.pool, rc.original, {Strategy::augmentation, t, std::nullopt}));
      if (!first) EXPECT_TRUE(std::includes(previous.begin(), previous.end(), current.begin(), current.end()));
      previous = current;
      first = false;
    }
  }
}

TEST(MergeTest, OriginalsFirstThenSortedSynthetic) {
  const Dataset d = make_dataset({{1, 0}, {0, 1}, {1, 1}});
  SelectionResult r;
  r.selected = {sample("o2", 3, 0.9, {1, 1}), sample("o1", 0, 0.95, {0, 1}), sample("o1", 10, 0.92, {0, 1}),
                sample("o1", 2, 0.92, {0, 1})};
  const Dataset merged = merge(d, r);
  ASSERT_EQ(merged.size(), 7u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(merged.items[i], d.items[i]);
  EXPECT_EQ(merged.items[3].id, "o1#0");
  EXPECT_EQ(merged.items[4].id, "o1#2");
  EXPECT_EQ(merged.items[5].id, "o1#10");
  EXPECT_EQ(merged.items[6].id, "o2#3");
  EXPECT_EQ(merged.items[6].labels, (LabelVector{1, 1}));
  EXPECT_NO_THROW(validate(merged));
}

TEST(MergeTest, IdCollisionRejected) {
  Dataset d = make_dataset({{1, 0}, {0, 1}});
  d.items[1].id = "o0#0";
  SelectionResult r;
  r.selected = {sample("o0", 0, 0.9, {1, 0})};
  EXPECT_THROW(merge(d, r), DataError);
}

TEST(MergeTest, OversamplingRaisesMinorityRatio) {
  const Dataset d = make_dataset({{1, 0}, {1, 0}, {1, 0}, {1, 0}, {0, 1}});
  std::vector<SyntheticSample> samples;
  for (std::size_t v = 0; v < 5; ++v) samples.push_back(sample("o4", v, 0.95, {0, 1}));
  const auto r = select_oversampling({samples, ""}, d,
                                     {Strategy::oversampling, 0.9, compute_targets(class_stats(d), 10)});
  const auto before = class_stats(d);
  const auto after = class_stats(merge(d, r));
  EXPECT_GT(after.categories[1].ratio, before.categories[1].ratio);
  EXPECT_EQ(after.categories[1].positives, 4u);
  EXPECT_EQ(r.merged_stats.categories[1].positives, after.categories[1].positives);
  EXPECT_EQ(r.merged_stats.categories[1].ratio, after.categories[1].ratio);
}

}  // namespace
}  // namespace qsynth
