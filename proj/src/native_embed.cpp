// SPDX-License-Identifier: Apache-2.0
#include "qsynth/native_embed.hpp"

#include <cmath>
#include <unordered_set>

#include "qsynth/error.hpp"
#include "qsynth/random.hpp"
#include "qsynth/text.hpp"

namespace qsynth {

namespace {

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

std::vector<std::size_t> NativeEmbedBackend::buckets(std::string_view text) {
  std::u32string cps = U" ";
  for (char32_t c : decode_utf8(text)) cps.push_back(c >= U'A' && c <= U'Z' ? c + 32 : c);
  cps.push_back(U' ');

  std::vector<std::size_t> out;
  if (cps.size() < 3) return out;
  out.reserve(cps.size() - 2);
  std::string gram;
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
    gram.clear();
    for (std::size_t j = i; j < i + 3; ++j) append_utf8(gram, cps[j]);
    out.push_back(static_cast<std::size_t>(fnv1a64(gram) % dimension));
  }
  return out;
}

NativeEmbedBackend NativeEmbedBackend::build(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw DataError(0, "cannot build an embedder from an empty corpus");
  std::vector<std::size_t> df(dimension, 0);
  for (const auto& doc : corpus) {
    const auto b = buckets(doc);
    for (std::size_t bucket : std::unordered_set<std::size_t>(b.begin(), b.end())) ++df[bucket];
  }
  NativeEmbedBackend backend;
  backend.idf_.resize(dimension);
  const double n = static_cast<double>(corpus.size());
  for (std::size_t i = 0; i < dimension; ++i)
    backend.idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  return backend;
}

NativeEmbedBackend NativeEmbedBackend::build(const Dataset& d) {
  std::vector<std::string> corpus;
  corpus.reserve(d.size());
  for (const auto& item : d.items) corpus.push_back(normalized_text(item.text));
  return build(corpus);
}

Embedding NativeEmbedBackend::embed_one(std::string_view text) const {
  Embedding v(dimension, 0.0);
  for (std::size_t bucket : buckets(text)) v[bucket] += 1.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < dimension; ++i) {
    v[i] *= idf_[i];
    norm += v[i] * v[i];
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
  }
  return v;
}

std::vector<Embedding> NativeEmbedBackend::embed(const std::vector<std::string>& texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

}  // namespace qsynth
