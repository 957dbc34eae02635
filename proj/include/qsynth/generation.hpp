// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsynth/corpus.hpp"
#include "qsynth/random.hpp"
#include "qsynth/text.hpp"

namespace qsynth {

struct GenerationConfig {
  double mask_ratio = 0.25;           ///< fraction of tokens masked per variant, in (0, 1]
  std::size_t variants_per_source = 10;
  std::size_t top_k = 20;
  double max_similarity = 0.95;       ///< variants more similar than this to their source are rejected
  std::size_t retry_budget = 20;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct MaskedSequence {
  Tokens tokens;
  std::vector<std::size_t> masked_positions;  ///< sorted, unique, in range
};

struct Candidate {
  std::string token;
  double score = 0.0;
};

/// Ranked candidates for every masked position, in position order.
struct FillResult {
  std::vector<std::vector<Candidate>> positions;
  bool padded = false;  ///< some position had fewer than k distinct candidates
};

/// Masked-token predictor. Implementations must tolerate concurrent calls.
class FillBackend {
 public:
  virtual ~FillBackend() = default;

  /// Exactly k candidates per masked position, best first.
  virtual FillResult fill(const MaskedSequence& seq, std::size_t k) const = 0;
};

struct SyntheticSample {
  std::string source_id;
  std::size_t variant_index = 0;
  std::string text;
  double similarity = 0.0;  ///< diversity ratio against the source
  std::optional<double> quality;
  LabelVector labels;
  bool degraded = false;

  friend bool operator==(const SyntheticSample&, const SyntheticSample&) = default;
};

/// max(1, round(ratio · length)).
std::size_t mask_count(std::size_t length, double ratio);

/// Picks mask_count(|tokens|, ratio) positions uniformly without replacement.
MaskedSequence mask_sequence(Tokens tokens, double ratio, Rng& rng);

/// The surface form variants are compared against: the source text after a
/// tokenize/detokenize pass, so spacing differences never count as diversity.
std::string normalized_text(std::string_view text);

/// Exactly cfg.variants_per_source variants of one comment. Rejected
/// candidates (too similar, or repeating an earlier variant) are redrawn
/// with fresh masks; once the retry budget is spent the most diverse
/// rejected candidate is kept and flagged as degraded.
std::vector<SyntheticSample> generate_variants(const LabeledComment& source, const GenerationConfig& cfg,
                                               const FillBackend& backend, Rng& rng);

/// n·|d| samples ordered by source, then variant index. Each source draws
/// from its own stream keyed by (seed, id), so the output does not depend
/// on cfg.threads.
std::vector<SyntheticSample> generate_corpus(const Dataset& d, const GenerationConfig& cfg,
                                             const FillBackend& backend);

}  // namespace qsynth
