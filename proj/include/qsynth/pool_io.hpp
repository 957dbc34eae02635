// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <vector>

#include "qsynth/generation.hpp"

namespace qsynth {

/// One JSON object per line:
/// {"source_id","variant_index","text","similarity","q","labels","degraded"}.
/// Unscored samples carry "q": null.
void write_pool(const std::vector<SyntheticSample>& samples, const std::filesystem::path& path);
std::vector<SyntheticSample> read_pool(const std::filesystem::path& path);

}  // namespace qsynth
