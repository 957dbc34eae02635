// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qsynth {

using Tokens = std::vector<std::string>;

/// Splits on whitespace and emits every ASCII punctuation character as its
/// own token. Runs of letters, digits, underscores and non-ASCII bytes form
/// word tokens, so multi-byte UTF-8 sequences are never cut.
Tokens tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string detokenize(const Tokens& tokens);

bool is_valid_utf8(std::string_view text) noexcept;

/// Decodes UTF-8 into code points. Invalid bytes map to U+FFFD one byte at a time.
std::u32string decode_utf8(std::string_view text);

}  // namespace qsynth
