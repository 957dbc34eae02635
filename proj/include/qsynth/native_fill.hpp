// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qsynth/corpus.hpp"
#include "qsynth/generation.hpp"

namespace qsynth {

/// Corpus-statistics stand-in for a fine-tuned masked language model.
///
/// A candidate w for a masked slot with visible neighbours l and r scores
///   left_weight·P(w | l) + right_weight·P(w | r) + unigram_weight·P(w)
/// where P(w | l) = count(l w) / count(l ·) and P(w | r) = count(w r) / count(· r).
/// A neighbour that is itself masked, or missing at a sequence boundary,
/// contributes nothing. Ties rank by token text. The vocabulary is closed
/// over the training corpus.
class NativeFillBackend final : public FillBackend {
 public:
  static constexpr double left_weight = 0.45;
  static constexpr double right_weight = 0.45;
  static constexpr double unigram_weight = 0.10;

  /// Throws DataError on an empty dataset.
  static NativeFillBackend train(const Dataset& d);

  FillResult fill(const MaskedSequence& seq, std::size_t k) const override;

  std::size_t vocabulary_size() const noexcept { return vocab_.size(); }

 private:
  using TokenId = std::uint32_t;
  static constexpr TokenId none = static_cast<TokenId>(-1);

  struct Neighbours {
    std::unordered_map<TokenId, std::size_t> counts;
    std::size_t total = 0;
  };

  TokenId lookup(const std::string& token) const;
  double score(TokenId w, TokenId left, TokenId right) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<std::size_t> unigram_;
  std::size_t token_total_ = 0;
  std::vector<TokenId> by_unigram_;     // vocabulary ordered by (count desc, text asc)
  std::vector<Neighbours> followers_;   // followers_[l]: tokens seen right after l
  std::vector<Neighbours> predecessors_;  // predecessors_[r]: tokens seen right before r
};

}  // namespace qsynth
