// SPDX-License-Identifier: Apache-2.0
#include "qsynth/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "parallel.hpp"
#include "qsynth/error.hpp"

namespace qsynth {

namespace {

// Embeds texts in fixed batches; result order matches input order.
std::vector<Embedding> embed_batched(const std::vector<std::string>& texts, const EmbedBackend& backend,
                                     std::size_t batch_size, std::size_t threads) {
  std::vector<Embedding> out(texts.size());
  const std::size_t batches = (texts.size() + batch_size - 1) / batch_size;
  detail::parallel_for(batches, threads, [&](std::size_t b) {
    const std::size_t lo = b * batch_size;
    const std::size_t hi = std::min(texts.size(), lo + batch_size);
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(lo),
                                   texts.begin() + static_cast<std::ptrdiff_t>(hi));
    std::vector<Embedding> vectors;
    try {
      vectors = backend.embed(batch);
    } catch (const BackendError& e) {
      throw BackendError("embedding samples " + std::to_string(lo) + ".." + std::to_string(hi - 1) + ": " + e.what());
    }
    if (vectors.size() != batch.size())
      throw BackendError("embed backend returned " + std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(batch.size()) + " texts");
    std::move(vectors.begin(), vectors.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
  });
  return out;
}

}  // namespace

double cosine(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size() || a.empty())
    throw BackendError("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw BackendError("zero-norm embedding; quality is undefined");
  // sqrt(x*x) == x exactly in IEEE arithmetic, so identical vectors give exactly 1.
  return dot / std::sqrt(aa * bb);
}

double quality_score(const std::string& source, const std::string& variant, const EmbedBackend& backend) {
  const auto vectors = backend.embed({source, variant});
  if (vectors.size() != 2) throw BackendError("embed backend returned wrong number of vectors");
  return std::clamp(cosine(vectors[0], vectors[1]), 0.0, 1.0);
}

ScoredPool score_pool(std::vector<SyntheticSample> samples, const Dataset& sources, const EmbedBackend& backend,
                      std::size_t batch_size, std::size_t threads) {
  batch_size = std::max<std::size_t>(batch_size, 1);
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < sources.items.size(); ++i) by_id.emplace(sources.items[i].id, i);

  // One embedding per referenced source, in first-use order.
  std::unordered_map<std::size_t, std::size_t> source_slot;
  std::vector<std::string> source_texts;
  std::vector<std::size_t> sample_source(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto it = by_id.find(samples[i].source_id);
    if (it == by_id.end())
      throw DataError(i + 1, "sample source id '" + samples[i].source_id + "' not found in dataset");
    auto [slot, inserted] = source_slot.try_emplace(it->second, source_texts.size());
    if (inserted) source_texts.push_back(normalized_text(sources.items[it->second].text));
    sample_source[i] = slot->second;
  }

  std::vector<std::string> sample_texts;
  sample_texts.reserve(samples.size());
  for (const auto& s : samples) sample_texts.push_back(s.text);

  const auto source_vectors = embed_batched(source_texts, backend, batch_size, threads);
  const auto sample_vectors = embed_batched(sample_texts, backend, batch_size, threads);

  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      samples[i].quality = std::clamp(cosine(source_vectors[sample_source[i]], sample_vectors[i]), 0.0, 1.0);
    } catch (const BackendError& e) {
      throw BackendError("sample " + std::to_string(i) + " (" + samples[i].source_id + "#" +
                         std::to_string(samples[i].variant_index) + "): " + e.what());
    }
  }
  return {std::move(samples), {}};
}

}  // namespace qsynth
