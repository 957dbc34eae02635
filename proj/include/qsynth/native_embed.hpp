// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

#include "qsynth/corpus.hpp"
#include "qsynth/scoring.hpp"

namespace qsynth {

/// Hashed character 3-gram TF-IDF embedder.
///
/// Text is lowercased (ASCII) and padded with one space at each end, then
/// every 3-code-point window is hashed (FNV-1a over its UTF-8 bytes) into
/// one of `dimension` buckets. Weights are raw counts times
/// idf = ln((1 + N) / (1 + df)) + 1, with df counted per bucket over the
/// reference corpus of N documents. Vectors are L2 normalised.
class NativeEmbedBackend final : public EmbedBackend {
 public:
  static constexpr std::size_t dimension = 1024;

  /// Throws DataError on an empty corpus.
  static NativeEmbedBackend build(const std::vector<std::string>& corpus);
  static NativeEmbedBackend build(const Dataset& d);

  std::vector<Embedding> embed(const std::vector<std::string>& texts) const override;

  Embedding embed_one(std::string_view text) const;
  double idf(std::size_t bucket) const { return idf_.at(bucket); }

  /// Bucket of each 3-gram in `text`, in window order.
  static std::vector<std::size_t> buckets(std::string_view text);

 private:
  std::vector<double> idf_;
};

}  // namespace qsynth
