// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qsynth/corpus.hpp"
#include "qsynth/error.hpp"
#include "qsynth/generation.hpp"
#include "qsynth/report.hpp"
#include "qsynth/scoring.hpp"
#include "qsynth/selection.hpp"

namespace qsynth {

/// Error raised by a pipeline stage; what() is prefixed with "<stage>: ".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

enum class BackendKind { native, external };

inline const std::vector<double> default_sweep{0.70, 0.80, 0.90, 0.925, 0.95, 0.975};

struct PipelineConfig {
  std::filesystem::path dataset;
  std::optional<FileFormat> format;  ///< inferred from the dataset extension when unset
  Language language = Language::java;
  GenerationConfig generation;
  BackendKind backend = BackendKind::native;
  std::string endpoint;
  Strategy strategy = Strategy::oversampling;
  std::optional<double> qsynt;  ///< single threshold; overrides the sweep
  std::vector<double> sweep = default_sweep;
  double cap_multiplier = 10.0;
  std::size_t batch_size = 256;
  std::filesystem::path out = "out";
  FileFormat output_format = FileFormat::jsonl;
  bool text_report = true;

  /// Thresholds a sweep or run covers: {qsynt} when set, else the sweep list.
  std::vector<double> thresholds() const;

  /// Throws ConfigError on any out-of-range field or an empty threshold set.
  void validate() const;

  FileFormat input_format() const;
};

/// Reads a flat TOML file. Keys: dataset, format, schema, backend, endpoint,
/// seed, qsynt, strategy, sweep, out, output_format, mask_ratio, variants,
/// top_k, max_similarity, retry_budget, threads, cap_multiplier,
/// batch_size, text_report. Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

struct Backends {
  std::unique_ptr<FillBackend> fill;
  std::unique_ptr<EmbedBackend> embed;
};

/// Native backends are trained on `d`; external ones share one connection.
Backends make_backends(const PipelineConfig& cfg, const Dataset& d, bool need_fill, bool need_embed);

Dataset load_input(const PipelineConfig& cfg);

/// Fixed artifact names inside cfg.out.
namespace artifact {
inline constexpr const char* raw_pool = "pool.jsonl";
inline constexpr const char* scored_pool = "scored_pool.jsonl";
inline constexpr const char* report_json = "report.json";
inline constexpr const char* report_text = "report.txt";
std::string merged_dataset(Strategy s, double threshold, FileFormat format);
std::string selection(Strategy s, double threshold);
}  // namespace artifact

std::string fingerprint(const PipelineConfig& cfg);

/// Each stage writes its artifact into cfg.out before returning.
std::vector<SyntheticSample> stage_generate(const PipelineConfig& cfg, const Dataset& d, const FillBackend& fill);
ScoredPool stage_score(const PipelineConfig& cfg, const Dataset& d, std::vector<SyntheticSample> pool,
                       const EmbedBackend& embed);
SelectionResult stage_select(const PipelineConfig& cfg, const Dataset& d, const ScoredPool& pool, double threshold);

/// Selection for every threshold, merged datasets, and the run report.
RunReport stage_sweep(const PipelineConfig& cfg, const Dataset& d, const ScoredPool& pool);

/// generate, score, then sweep.
RunReport run(const PipelineConfig& cfg);

}  // namespace qsynth
