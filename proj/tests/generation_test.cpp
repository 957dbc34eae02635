// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

#include "corpus_fixture.hpp"
#include "qsynth/error.hpp"
#include "qsynth/generation.hpp"
#include "qsynth/native_fill.hpp"
#include "qsynth/sequence_match.hpp"

namespace qsynth {
namespace {

// Offers the same ranked list at every masked position.
class FixedFill final : public FillBackend {
 public:
  explicit FixedFill(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {}
  FillResult fill(const MaskedSequence& seq, std::size_t k) const override {
    FillResult r;
    for (std::size_t p = 0; p < seq.masked_positions.size(); ++p) {
      std::vector<Candidate> list;
      for (std::size_t j = 0; j < k; ++j) list.push_back({tokens_[std::min(j, tokens_.size() - 1)], -double(j)});
      r.positions.push_back(std::move(list));
    }
    return r;
  }

 private:
  std::vector<std::string> tokens_;
};

// Always proposes the token that is already there.
class EchoFill final : public FillBackend {
 public:
  FillResult fill(const MaskedSequence& seq, std::size_t k) const override {
    FillResult r;
    for (auto p : seq.masked_positions) r.positions.emplace_back(k, Candidate{seq.tokens[p], 0.0});
    return r;
  }
};

class FailingFill final : public FillBackend {
 public:
  explicit FailingFill(std::string bad) : bad_(std::move(bad)) {}
  FillResult fill(const MaskedSequence& seq, std::size_t k) const override {
    if (detokenize(seq.tokens).find(bad_) != std::string::npos) throw std::runtime_error("model crashed");
    return EchoFill().fill(seq, k);
  }

 private:
  std::string bad_;
};

LabeledComment comment(std::string id, std::string text) {
  return {std::move(id), Language::java, std::move(text), {0, 1, 0, 0, 0, 0, 1}};
}

TEST(MaskCountTest, RoundsWithMinimumOne) {
  EXPECT_EQ(mask_count(20, 0.25), 5u);
  EXPECT_EQ(mask_count(1, 0.25), 1u);
  EXPECT_EQ(mask_count(3, 0.25), 1u);
  EXPECT_EQ(mask_count(10, 0.25), 3u);  // 2.5 rounds half away from zero
  EXPECT_EQ(mask_count(7, 1.0), 7u);
}

TEST(MaskSequenceTest, InvariantsAndDeterminism) {
  Tokens tokens;
  for (int i = 0; i < 20; ++i) tokens.push_back("t" + std::to_string(i));
  Rng a(42), b(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m1 = mask_sequence(tokens, 0.25, a);
    const auto m2 = mask_sequence(tokens, 0.25, b);
    EXPECT_EQ(m1.masked_positions, m2.masked_positions);
    ASSERT_EQ(m1.masked_positions.size(), 5u);
    for (std::size_t i = 0; i < m1.masked_positions.size(); ++i) {
      EXPECT_LT(m1.masked_positions[i], tokens.size());
      if (i) EXPECT_LT(m1.masked_positions[i - 1], m1.masked_positions[i]);
    }
  }
}

TEST(MaskSequenceTest, SingleTokenAlwaysMasked) {
  Rng rng(1);
  const auto m = mask_sequence({"ok"}, 0.25, rng);
  EXPECT_EQ(m.masked_positions, (std::vector<std::size_t>{0}));
}

// Each of 8 positions should be picked with probability 2/8.
TEST(MaskSequenceTest, PositionsRoughlyUniform) {
  const Tokens tokens(8, "w");
  Rng rng(3);
  std::vector<int> hits(8, 0);
  const int trials = 40000;
  for (int t = 0; t < trials; ++t)
    for (auto p : mask_sequence(tokens, 0.25, rng).masked_positions) ++hits[p];
  for (int h : hits) EXPECT_NEAR(h / double(trials), 0.25, 0.01);
}

TEST(GenerateVariantsTest, DefaultConfigGivesTenDiverseVariants) {
  const Dataset d = testing::comment_corpus(Language::java, 300, 8, 10);
  const auto backend = NativeFillBackend::train(d);
  const GenerationConfig cfg;
  for (std::size_t i = 0; i < 20; ++i) {
    Rng rng(i);
    const auto variants = generate_variants(d.items[i], cfg, backend, rng);
    ASSERT_EQ(variants.size(), 10u);
    std::set<std::string> texts;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const auto& s = variants[v];
      EXPECT_EQ(s.variant_index, v);
      EXPECT_EQ(s.source_id, d.items[i].id);
      EXPECT_EQ(s.labels, d.items[i].labels);
      EXPECT_FALSE(s.quality.has_value());
      EXPECT_EQ(s.similarity, diversity_ratio(s.text, normalized_text(d.items[i].text)));
      if (!s.degraded) {
        EXPECT_LE(s.similarity, cfg.max_similarity);
        EXPECT_TRUE(texts.insert(s.text).second) << "duplicate variant " << s.text;
      }
    }
  }
}

TEST(GenerateVariantsTest, SingleTokenNeverReproducesSource) {
  const FixedFill backend({"ok", "fine", "good", "great", "done", "yes"});
  GenerationConfig cfg;
  cfg.top_k = 6;
  cfg.variants_per_source = 4;
  Rng rng(9);
  const auto variants = generate_variants(comment("s", "ok"), cfg, backend, rng);
  ASSERT_EQ(variants.size(), 4u);
  for (const auto& s : variants) {
    EXPECT_FALSE(s.degraded);
    EXPECT_NE(s.text, "ok");
    EXPECT_EQ(tokenize(s.text).size(), 1u);
  }
}

TEST(GenerateVariantsTest, ExhaustedBudgetKeepsCardinalityAndFlags) {
  const EchoFill backend;
  GenerationConfig cfg;
  cfg.retry_budget = 3;
  Rng rng(1);
  const auto variants = generate_variants(comment("s", "returns the sum of both operands"), cfg, backend, rng);
  ASSERT_EQ(variants.size(), cfg.variants_per_source);
  for (const auto& s : variants) {
    EXPECT_TRUE(s.degraded);
    EXPECT_EQ(s.similarity, 1.0);
  }
}

TEST(GenerateVariantsTest, DuplicatesCountAsFailures) {
  // Only two distinct substitutes exist for a one-token sentence.
  const FixedFill backend({"x", "y"});
  GenerationConfig cfg;
  cfg.top_k = 2;
  cfg.variants_per_source = 4;
  cfg.retry_budget = 5;
  Rng rng(2);
  const auto variants = generate_variants(comment("s", "ok"), cfg, backend, rng);
  ASSERT_EQ(variants.size(), 4u);
  EXPECT_FALSE(variants[0].degraded);
  EXPECT_FALSE(variants[1].degraded);
  EXPECT_NE(variants[0].text, variants[1].text);
  EXPECT_TRUE(variants[2].degraded);
  EXPECT_TRUE(variants[3].degraded);
}

TEST(GenerateVariantsTest, DeterministicUnderFixedSeed) {
  const Dataset d = testing::comment_corpus(Language::python, 50, 4);
  const auto backend = NativeFillBackend::train(d);
  const GenerationConfig cfg;
  Rng a(77), b(77);
  EXPECT_EQ(generate_variants(d.items[3], cfg, backend, a), generate_variants(d.items[3], cfg, backend, b));
}

TEST(GenerateVariantsTest, BackendFailureNamesSource) {
  const FailingFill backend("sum");
  Rng rng(0);
  try {
    generate_variants(comment("src-7", "returns the sum"), GenerationConfig{}, backend, rng);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("src-7"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("model crashed"), std::string::npos);
  }
}

TEST(GenerateCorpusTest, CardinalityIsNTimesSize) {
  const Dataset d = testing::comment_corpus(Language::pharo, 100, 12);
  const auto backend = NativeFillBackend::train(d);
  const auto pool = generate_corpus(d, GenerationConfig{}, backend);
  ASSERT_EQ(pool.size(), 1000u);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    EXPECT_EQ(pool[i].source_id, d.items[i / 10].id);
    EXPECT_EQ(pool[i].variant_index, i % 10);
  }
}

TEST(GenerateCorpusTest, CardinalityProperty) {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = testing::comment_corpus(Language::java, 1 + rng.below(40), rng.next());
    GenerationConfig cfg;
    cfg.variants_per_source = 1 + rng.below(6);
    cfg.top_k = 1 + rng.below(25);
    cfg.retry_budget = rng.below(5);
    cfg.seed = rng.next();
    const auto backend = NativeFillBackend::train(d);
    EXPECT_EQ(generate_corpus(d, cfg, backend).size(), cfg.variants_per_source * d.size());
  }
}

TEST(GenerateCorpusTest, EmptyDatasetRejected) {
  const Dataset empty{CategorySchema::builtin(Language::java), {}, Split::train};
  EXPECT_THROW(generate_corpus(empty, GenerationConfig{}, EchoFill{}), DataError);
}

TEST(GenerateCorpusTest, IndependentOfWorkerCount) {
  const Dataset d = testing::comment_corpus(Language::java, 120, 5);
  const auto backend = NativeFillBackend::train(d);
  GenerationConfig cfg;
  cfg.seed = 2024;
  const auto sequential = generate_corpus(d, cfg, backend);
  cfg.threads = 4;
  EXPECT_EQ(generate_corpus(d, cfg, backend), sequential);
}

TEST(GenerateCorpusTest, AggregatesBackendFailures) {
  Dataset d = testing::comment_corpus(Language::java, 6, 1);
  d.items[1].text = "boom one";
  d.items[4].text = "boom two";
  const FailingFill backend("boom");
  try {
    generate_corpus(d, GenerationConfig{}, backend);
    FAIL();
  } catch (const BackendError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2 source(s) failed"), std::string::npos) << msg;
    EXPECT_NE(msg.find(d.items[1].id), std::string::npos);
    EXPECT_NE(msg.find(d.items[4].id), std::string::npos);
  }
}

TEST(GenerationConfigTest, Validation) {
  GenerationConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.mask_ratio = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_similarity = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.variants_per_source = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace qsynth
