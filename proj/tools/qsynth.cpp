// SPDX-License-Identifier: Apache-2.0
//
// qsynth: quality-gated synthetic oversampling for multi-label comment corpora.

#include <CLI11.hpp>
#include <iostream>

#include "qsynth/pipeline.hpp"
#include "qsynth/pool_io.hpp"

namespace {

using namespace qsynth;

struct Flags {
  std::string config;
  std::string dataset;
  std::string format;
  std::string schema;
  std::string backend;
  std::string endpoint;
  std::optional<std::uint64_t> seed;
  std::optional<double> qsynt;
  std::string strategy;
  std::vector<double> sweep;
  std::string out;
  std::string output_format;
  std::optional<double> mask_ratio;
  std::optional<std::size_t> variants;
  std::optional<std::size_t> top_k;
  std::optional<double> max_similarity;
  std::optional<std::size_t> retries;
  std::optional<std::size_t> threads;
  std::optional<double> cap;
  std::optional<std::size_t> batch_size;
  std::string pool;
  bool json = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "TOML config file");
  cmd->add_option("--dataset", f.dataset, "Input dataset (.csv or .jsonl)");
  cmd->add_option("--format", f.format, "Input format")->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--schema", f.schema, "Category schema")->check(CLI::IsMember({"java", "python", "pharo"}));
}

void add_generation(CLI::App* cmd, Flags& f) {
  cmd->add_option("--backend", f.backend, "Fill/embed backend")->check(CLI::IsMember({"native", "external"}));
  cmd->add_option("--endpoint", f.endpoint, "External backend: tcp://host:port or exec:<command>");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--mask-ratio", f.mask_ratio, "Fraction of tokens masked per variant");
  cmd->add_option("--variants", f.variants, "Variants per source sentence");
  cmd->add_option("--top-k", f.top_k, "Candidates considered per masked token");
  cmd->add_option("--max-similarity", f.max_similarity, "Diversity gate: maximum similarity to the source");
  cmd->add_option("--retries", f.retries, "Retry budget per variant");
  cmd->add_option("--threads", f.threads, "Worker threads");
  cmd->add_option("--batch-size", f.batch_size, "Texts per embedding request");
}

void add_selection(CLI::App* cmd, Flags& f) {
  cmd->add_option("--qsynt", f.qsynt, "Quality threshold");
  cmd->add_option("--strategy", f.strategy, "Selection strategy")
      ->check(CLI::IsMember({"oversampling", "augmentation"}));
  cmd->add_option("--sweep", f.sweep, "Threshold list for sweeps")->delimiter(',');
  cmd->add_option("--cap", f.cap, "Per-category target cap as a multiple of the current count");
  cmd->add_option("--output-format", f.output_format, "Merged dataset format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
}

PipelineConfig resolve(const Flags& f) {
  PipelineConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config, cfg);
  if (!f.dataset.empty()) cfg.dataset = f.dataset;
  if (!f.format.empty()) cfg.format = f.format == "csv" ? FileFormat::csv : FileFormat::jsonl;
  if (!f.output_format.empty()) cfg.output_format = f.output_format == "csv" ? FileFormat::csv : FileFormat::jsonl;
  if (!f.schema.empty()) cfg.language = *parse_language(f.schema);
  if (!f.backend.empty()) cfg.backend = f.backend == "native" ? BackendKind::native : BackendKind::external;
  if (!f.endpoint.empty()) cfg.endpoint = f.endpoint;
  if (f.seed) cfg.generation.seed = *f.seed;
  if (f.qsynt) cfg.qsynt = *f.qsynt;
  if (!f.strategy.empty()) cfg.strategy = *parse_strategy(f.strategy);
  if (!f.sweep.empty()) cfg.sweep = f.sweep;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.mask_ratio) cfg.generation.mask_ratio = *f.mask_ratio;
  if (f.variants) cfg.generation.variants_per_source = *f.variants;
  if (f.top_k) cfg.generation.top_k = *f.top_k;
  if (f.max_similarity) cfg.generation.max_similarity = *f.max_similarity;
  if (f.retries) cfg.generation.retry_budget = *f.retries;
  if (f.threads) cfg.generation.threads = *f.threads;
  if (f.cap) cfg.cap_multiplier = *f.cap;
  if (f.batch_size) cfg.batch_size = *f.batch_size;
  return cfg;
}

void validate(const PipelineConfig& cfg) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw StageError("config", e.what());
  }
}

ScoredPool read_scored_pool(const PipelineConfig& cfg, const std::string& path) {
  try {
    ScoredPool pool{read_pool(path), fingerprint(cfg)};
    for (const auto& s : pool.samples) {
      if (!s.quality) throw DataError(0, "pool file '" + path + "' has unscored samples; run 'score' first");
    }
    return pool;
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("load", e.what());
  }
}

Backends open_backends(const PipelineConfig& cfg, const Dataset& d, bool fill, bool embed) {
  try {
    return make_backends(cfg, d, fill, embed);
  } catch (const Error& e) {
    throw StageError("backend", e.what());
  }
}

std::string default_pool(const PipelineConfig& cfg, const char* name) { return (cfg.out / name).string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality-gated synthetic oversampling and augmentation for multi-label comment corpora"};
  app.require_subcommand(1);
  Flags f;

  auto* stats = app.add_subcommand("stats", "Per-category positive counts and ratios");
  add_common(stats, f);
  stats->add_flag("--json", f.json, "Print JSON instead of a table");

  auto* generate = app.add_subcommand("generate", "Generate the synthetic pool");
  add_common(generate, f);
  add_generation(generate, f);
  generate->add_option("--out", f.out, "Output directory");

  auto* score = app.add_subcommand("score", "Score a generated pool");
  add_common(score, f);
  add_generation(score, f);
  score->add_option("--pool", f.pool, "Unscored pool (default <out>/pool.jsonl)");
  score->add_option("--out", f.out, "Output directory");

  auto* sel = app.add_subcommand("select", "Select from a scored pool at one threshold and merge");
  add_common(sel, f);
  add_generation(sel, f);  // recorded in the report fingerprint
  add_selection(sel, f);
  sel->add_option("--pool", f.pool, "Scored pool (default <out>/scored_pool.jsonl)");
  sel->add_option("--out", f.out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Select over every sweep threshold and write the report");
  add_common(sweep, f);
  add_generation(sweep, f);  // recorded in the report fingerprint
  add_selection(sweep, f);
  sweep->add_option("--pool", f.pool, "Scored pool (default <out>/scored_pool.jsonl)");
  sweep->add_option("--out", f.out, "Output directory");

  auto* run = app.add_subcommand("run", "generate, score and sweep in one go");
  add_common(run, f);
  add_generation(run, f);
  add_selection(run, f);
  run->add_option("--out", f.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = resolve(f);

    if (stats->parsed()) {
      if (cfg.dataset.empty()) throw StageError("config", "no dataset given");
      const Dataset d = load_input(cfg);
      const ClassStats s = class_stats(d);
      std::cout << (f.json ? to_json(s).dump(2) + "\n" : render_text(s));
      return 0;
    }

    validate(cfg);
    const Dataset d = load_input(cfg);

    if (generate->parsed()) {
      auto backends = open_backends(cfg, d, true, false);
      const auto pool = stage_generate(cfg, d, *backends.fill);
      std::size_t degraded = 0;
      for (const auto& s : pool) degraded += s.degraded;
      std::cout << "generated " << pool.size() << " samples (" << degraded << " degraded) -> "
                << (cfg.out / artifact::raw_pool).string() << "\n";
    } else if (score->parsed()) {
      const std::string path = f.pool.empty() ? default_pool(cfg, artifact::raw_pool) : f.pool;
      std::vector<SyntheticSample> pool;
      try {
        pool = read_pool(path);
      } catch (const Error& e) {
        throw StageError("load", e.what());
      }
      auto backends = open_backends(cfg, d, false, true);
      const auto scored = stage_score(cfg, d, std::move(pool), *backends.embed);
      std::cout << "scored " << scored.samples.size() << " samples -> "
                << (cfg.out / artifact::scored_pool).string() << "\n";
    } else if (sel->parsed()) {
      if (!cfg.qsynt) throw StageError("config", "select needs --qsynt");
      const auto pool = read_scored_pool(cfg, f.pool.empty() ? default_pool(cfg, artifact::scored_pool) : f.pool);
      const auto result = stage_select(cfg, d, pool, *cfg.qsynt);
      std::cout << "selected " << result.selected.size() << " samples, synthetic fraction "
                << result.synthetic_fraction << " -> "
                << (cfg.out / artifact::merged_dataset(cfg.strategy, *cfg.qsynt, cfg.output_format)).string() << "\n";
    } else if (sweep->parsed()) {
      const auto pool = read_scored_pool(cfg, f.pool.empty() ? default_pool(cfg, artifact::scored_pool) : f.pool);
      const auto report = stage_sweep(cfg, d, pool);
      std::cout << render_text(report);
    } else if (run->parsed()) {
      const auto report = qsynth::run(cfg);
      std::cout << render_text(report);
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
