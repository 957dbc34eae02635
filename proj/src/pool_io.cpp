// SPDX-License-Identifier: Apache-2.0
#include "qsynth/pool_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "qsynth/error.hpp"

namespace qsynth {

void write_pool(const std::vector<SyntheticSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["source_id"] = s.source_id;
    j["variant_index"] = s.variant_index;
    j["text"] = s.text;
    j["similarity"] = s.similarity;
    j["q"] = s.quality ? nlohmann::ordered_json(*s.quality) : nlohmann::ordered_json(nullptr);
    j["labels"] = s.labels;
    j["degraded"] = s.degraded;
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<SyntheticSample> read_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::vector<SyntheticSample> samples;
  std::string line;
  for (std::size_t index = 1; std::getline(in, line); ++index) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SyntheticSample s;
      s.source_id = j.at("source_id").get<std::string>();
      s.variant_index = j.at("variant_index").get<std::size_t>();
      s.text = j.at("text").get<std::string>();
      s.similarity = j.at("similarity").get<double>();
      if (!j.at("q").is_null()) s.quality = j.at("q").get<double>();
      s.labels = j.at("labels").get<LabelVector>();
      s.degraded = j.at("degraded").get<bool>();
      samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(index, std::string("malformed pool record: ") + e.what());
    }
  }
  return samples;
}

}  // namespace qsynth
