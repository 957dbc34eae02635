// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

namespace qsynth {

/// Characters matched by recursive longest-common-substring decomposition
/// (Ratcliff/Obershelp), with a, b compared as code-point sequences.
std::size_t matched_characters(std::u32string_view a, std::u32string_view b);

/// Ratcliff/Obershelp similarity 2·M/(|a|+|b|) over characters.
///
/// The decomposition is order dependent for some inputs, so the result is
/// the larger of the two orientations. That keeps the score symmetric and
/// makes the diversity gate reject a variant if either reading is too close.
double diversity_ratio(std::string_view a, std::string_view b);

}  // namespace qsynth
