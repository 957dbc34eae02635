// SPDX-License-Identifier: Apache-2.0
#include "qsynth/native_fill.hpp"

#include <algorithm>

#include "qsynth/error.hpp"
#include "qsynth/text.hpp"

namespace qsynth {

NativeFillBackend NativeFillBackend::train(const Dataset& d) {
  if (d.empty()) throw DataError(0, "cannot train a fill backend on an empty dataset");
  NativeFillBackend b;
  std::vector<std::vector<TokenId>> sentences;
  sentences.reserve(d.size());
  for (const auto& item : d.items) {
    std::vector<TokenId> ids;
    for (auto& tok : tokenize(item.text)) {
      auto [it, inserted] = b.index_.try_emplace(tok, static_cast<TokenId>(b.vocab_.size()));
      if (inserted) b.vocab_.push_back(std::move(tok));
      ids.push_back(it->second);
    }
    sentences.push_back(std::move(ids));
  }

  const std::size_t v = b.vocab_.size();
  b.unigram_.assign(v, 0);
  b.followers_.resize(v);
  b.predecessors_.resize(v);
  for (const auto& ids : sentences) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      ++b.unigram_[ids[i]];
      ++b.token_total_;
      if (i + 1 < ids.size()) {
        ++b.followers_[ids[i]].counts[ids[i + 1]];
        ++b.followers_[ids[i]].total;
        ++b.predecessors_[ids[i + 1]].counts[ids[i]];
        ++b.predecessors_[ids[i + 1]].total;
      }
    }
  }

  b.by_unigram_.resize(v);
  for (TokenId t = 0; t < v; ++t) b.by_unigram_[t] = t;
  std::sort(b.by_unigram_.begin(), b.by_unigram_.end(), [&](TokenId x, TokenId y) {
    if (b.unigram_[x] != b.unigram_[y]) return b.unigram_[x] > b.unigram_[y];
    return b.vocab_[x] < b.vocab_[y];
  });
  return b;
}

NativeFillBackend::TokenId NativeFillBackend::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? none : it->second;
}

double NativeFillBackend::score(TokenId w, TokenId left, TokenId right) const {
  double s = unigram_weight * static_cast<double>(unigram_[w]) / static_cast<double>(token_total_);
  if (left != none && followers_[left].total > 0) {
    const auto& n = followers_[left];
    if (auto it = n.counts.find(w); it != n.counts.end())
      s += left_weight * static_cast<double>(it->second) / static_cast<double>(n.total);
  }
  if (right != none && predecessors_[right].total > 0) {
    const auto& n = predecessors_[right];
    if (auto it = n.counts.find(w); it != n.counts.end())
      s += right_weight * static_cast<double>(it->second) / static_cast<double>(n.total);
  }
  return s;
}

FillResult NativeFillBackend::fill(const MaskedSequence& seq, std::size_t k) const {
  FillResult result;
  result.positions.reserve(seq.masked_positions.size());
  const auto is_masked = [&](std::size_t p) {
    return std::binary_search(seq.masked_positions.begin(), seq.masked_positions.end(), p);
  };

  for (const std::size_t pos : seq.masked_positions) {
    const TokenId left = (pos > 0 && !is_masked(pos - 1)) ? lookup(seq.tokens[pos - 1]) : none;
    const TokenId right =
        (pos + 1 < seq.tokens.size() && !is_masked(pos + 1)) ? lookup(seq.tokens[pos + 1]) : none;

    // Context neighbours plus the best k unigram-only tokens cover the top k.
    std::vector<TokenId> pool;
    if (left != none)
      for (const auto& [w, c] : followers_[left].counts) pool.push_back(w);
    if (right != none)
      for (const auto& [w, c] : predecessors_[right].counts) pool.push_back(w);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    const std::size_t context_size = pool.size();
    std::size_t extra = 0;
    for (TokenId w : by_unigram_) {
      if (extra == k) break;
      if (std::binary_search(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(context_size), w)) continue;
      pool.push_back(w);
      ++extra;
    }

    std::vector<Candidate> ranked;
    ranked.reserve(pool.size());
    for (TokenId w : pool) ranked.push_back({vocab_[w], score(w, left, right)});
    const std::size_t keep = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                      [](const Candidate& x, const Candidate& y) {
                        if (x.score != y.score) return x.score > y.score;
                        return x.token < y.token;
                      });
    ranked.resize(keep);
    if (ranked.size() < k) {
      result.padded = true;
      ranked.resize(k, ranked.back());
    }
    result.positions.push_back(std::move(ranked));
  }
  return result;
}

}  // namespace qsynth
