// SPDX-License-Identifier: Apache-2.0
#include "qsynth/generation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "parallel.hpp"
#include "qsynth/error.hpp"
#include "qsynth/sequence_match.hpp"

namespace qsynth {

void GenerationConfig::validate() const {
  if (!(mask_ratio > 0.0 && mask_ratio <= 1.0)) throw ConfigError("mask_ratio must lie in (0, 1]");
  if (variants_per_source == 0) throw ConfigError("variants_per_source must be positive");
  if (top_k == 0) throw ConfigError("top_k must be positive");
  if (!(max_similarity >= 0.0 && max_similarity < 1.0)) throw ConfigError("max_similarity must lie in [0, 1)");
  if (threads == 0) throw ConfigError("threads must be positive");
}

std::size_t mask_count(std::size_t length, double ratio) {
  const auto rounded = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(length)));
  return std::clamp<std::size_t>(rounded, 1, std::max<std::size_t>(length, 1));
}

MaskedSequence mask_sequence(Tokens tokens, double ratio, Rng& rng) {
  const std::size_t m = mask_count(tokens.size(), ratio);
  std::vector<std::size_t> order(tokens.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.below(order.size() - i);
    std::swap(order[i], order[j]);
  }
  order.resize(m);
  std::sort(order.begin(), order.end());
  return {std::move(tokens), std::move(order)};
}

std::string normalized_text(std::string_view text) { return detokenize(tokenize(text)); }

std::vector<SyntheticSample> generate_variants(const LabeledComment& source, const GenerationConfig& cfg,
                                               const FillBackend& backend, Rng& rng) {
  const Tokens tokens = tokenize(source.text);
  if (tokens.empty()) throw DataError(0, "source '" + source.id + "' has no tokens");
  const std::string reference = detokenize(tokens);

  std::vector<SyntheticSample> out;
  out.reserve(cfg.variants_per_source);
  std::unordered_set<std::string> seen;

  for (std::size_t v = 0; v < cfg.variants_per_source; ++v) {
    std::optional<SyntheticSample> fallback;
    bool accepted = false;
    for (std::size_t attempt = 0; attempt <= cfg.retry_budget && !accepted; ++attempt) {
      const MaskedSequence seq = mask_sequence(tokens, cfg.mask_ratio, rng);
      FillResult fill;
      try {
        fill = backend.fill(seq, cfg.top_k);
      } catch (const std::exception& e) {
        throw BackendError("source '" + source.id + "': " + e.what());
      }
      if (fill.positions.size() != seq.masked_positions.size())
        throw BackendError("source '" + source.id + "': backend returned " + std::to_string(fill.positions.size()) +
                           " positions for " + std::to_string(seq.masked_positions.size()) + " masks");

      Tokens variant = tokens;
      for (std::size_t p = 0; p < seq.masked_positions.size(); ++p) {
        const auto& candidates = fill.positions[p];
        if (candidates.size() != cfg.top_k)
          throw BackendError("source '" + source.id + "': backend returned " + std::to_string(candidates.size()) +
                             " candidates, expected " + std::to_string(cfg.top_k));
        variant[seq.masked_positions[p]] = candidates[rng.below(candidates.size())].token;
      }

      SyntheticSample sample{source.id, v, detokenize(variant), 0.0, std::nullopt, source.labels, false};
      sample.similarity = diversity_ratio(sample.text, reference);
      if (sample.similarity <= cfg.max_similarity && sample.text != reference && !seen.contains(sample.text)) {
        seen.insert(sample.text);
        out.push_back(std::move(sample));
        accepted = true;
      } else if (!fallback || sample.similarity < fallback->similarity) {
        fallback = std::move(sample);
      }
    }
    if (!accepted) {
      fallback->degraded = true;
      seen.insert(fallback->text);
      out.push_back(std::move(*fallback));
    }
  }
  return out;
}

std::vector<SyntheticSample> generate_corpus(const Dataset& d, const GenerationConfig& cfg,
                                             const FillBackend& backend) {
  if (d.empty()) throw DataError(0, "cannot generate from an empty dataset");
  cfg.validate();

  const std::size_t n = cfg.variants_per_source;
  std::vector<SyntheticSample> pool(d.size() * n);
  std::vector<std::string> failures(d.size());

  detail::parallel_for(d.size(), cfg.threads, [&](std::size_t i) {
    const auto& source = d.items[i];
    Rng rng = Rng::for_stream(cfg.seed, source.id);
    try {
      auto variants = generate_variants(source, cfg, backend, rng);
      std::move(variants.begin(), variants.end(), pool.begin() + static_cast<std::ptrdiff_t>(i * n));
    } catch (const BackendError& e) {
      failures[i] = e.what();
    }
  });

  std::string message;
  std::size_t failed = 0;
  for (const auto& f : failures) {
    if (f.empty()) continue;
    if (failed++ < 10) message += (message.empty() ? "" : "; ") + f;
  }
  if (failed) throw BackendError(std::to_string(failed) + " source(s) failed: " + message);
  return pool;
}

}  // namespace qsynth
