// SPDX-License-Identifier: Apache-2.0
#include "qsynth/sequence_match.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "qsynth/text.hpp"

namespace qsynth {

namespace {

struct Match {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t size = 0;
};

// Longest common substring of a[alo,ahi) and b[blo,bhi). Ties go to the
// earliest start in a, then the earliest start in b.
Match longest_match(std::u32string_view a, std::u32string_view b, std::size_t alo, std::size_t ahi, std::size_t blo,
                    std::size_t bhi, std::vector<std::size_t>& prev, std::vector<std::size_t>& cur) {
  Match best{alo, blo, 0};
  const std::size_t width = bhi - blo;
  std::fill(prev.begin(), prev.begin() + width + 1, 0);
  for (std::size_t i = alo; i < ahi; ++i) {
    cur[0] = 0;
    for (std::size_t j = blo; j < bhi; ++j) {
      const std::size_t col = j - blo + 1;
      if (a[i] == b[j]) {
        const std::size_t k = prev[col - 1] + 1;
        cur[col] = k;
        if (k > best.size) best = {i + 1 - k, j + 1 - k, k};
      } else {
        cur[col] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace

std::size_t matched_characters(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> pending{{0, a.size(), 0, b.size()}};
  std::size_t matched = 0;
  while (!pending.empty()) {
    const auto [alo, ahi, blo, bhi] = pending.back();
    pending.pop_back();
    if (alo >= ahi || blo >= bhi) continue;
    const Match m = longest_match(a, b, alo, ahi, blo, bhi, prev, cur);
    if (m.size == 0) continue;
    matched += m.size;
    pending.emplace_back(alo, m.a, blo, m.b);
    pending.emplace_back(m.a + m.size, ahi, m.b + m.size, bhi);
  }
  return matched;
}

double diversity_ratio(std::string_view a, std::string_view b) {
  const auto ca = decode_utf8(a);
  const auto cb = decode_utf8(b);
  const std::size_t total = ca.size() + cb.size();
  if (total == 0) return 1.0;
  if (ca == cb) return 1.0;
  const std::size_t m = std::max(matched_characters(ca, cb), matched_characters(cb, ca));
  return 2.0 * static_cast<double>(m) / static_cast<double>(total);
}

}  // namespace qsynth
