// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "qsynth/corpus.hpp"
#include "qsynth/generation.hpp"

namespace qsynth {

using Embedding = std::vector<double>;

/// Sentence embedder. Same text must give the same vector, and every
/// vector from one instance shares a dimension. Implementations must
/// tolerate concurrent calls.
class EmbedBackend {
 public:
  virtual ~EmbedBackend() = default;
  virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) const = 0;
};

/// Cosine similarity of two embeddings. Throws BackendError on a dimension
/// mismatch or a zero-norm vector.
double cosine(const Embedding& a, const Embedding& b);

/// Semantic fidelity of `variant` to `source`: cosine clamped to [0, 1].
double quality_score(const std::string& source, const std::string& variant, const EmbedBackend& backend);

struct ScoredPool {
  std::vector<SyntheticSample> samples;  ///< every quality set
  std::string fingerprint;               ///< identifies the generation and scoring setup
};

/// Sets quality on every sample, in input order. Texts are sent to the
/// backend in batches of `batch_size`; batches may run on `threads` workers.
ScoredPool score_pool(std::vector<SyntheticSample> samples, const Dataset& sources, const EmbedBackend& backend,
                      std::size_t batch_size = 256, std::size_t threads = 1);

}  // namespace qsynth
