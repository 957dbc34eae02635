// SPDX-License-Identifier: Apache-2.0
#include "qsynth/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <toml.hpp>

#include "qsynth/native_embed.hpp"
#include "qsynth/native_fill.hpp"
#include "qsynth/pool_io.hpp"
#include "qsynth/wire.hpp"

namespace qsynth {

namespace fs = std::filesystem;

namespace {

std::string threshold_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

// Runs `body`, re-throwing any library error tagged with `stage`.
template <typename F>
auto staged(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create output directory: " + ec.message());
}

template <typename T>
T require(const toml::node& node, std::string_view key) {
  if (auto v = node.value<T>()) return *v;
  throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
}

std::size_t require_count(const toml::node& node, std::string_view key) {
  const auto v = require<std::int64_t>(node, key);
  if (v < 0) throw ConfigError("config key '" + std::string(key) + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<double> PipelineConfig::thresholds() const {
  if (qsynt) return {*qsynt};
  return sweep;
}

FileFormat PipelineConfig::input_format() const {
  if (format) return *format;
  if (auto f = format_from_path(dataset)) return *f;
  throw ConfigError("cannot infer the format of '" + dataset.string() + "'; pass --format");
}

void PipelineConfig::validate() const {
  generation.validate();
  if (dataset.empty()) throw ConfigError("no dataset given");
  if (thresholds().empty()) throw ConfigError("no quality threshold: set qsynt or a non-empty sweep");
  for (double t : thresholds()) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("quality threshold " + std::to_string(t) + " is outside [0, 1]");
  }
  if (backend == BackendKind::external && endpoint.empty()) throw ConfigError("external backend needs an endpoint");
  if (!(cap_multiplier > 0.0)) throw ConfigError("cap_multiplier must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (out.empty()) throw ConfigError("no output directory given");
}

PipelineConfig load_config(const fs::path& path, PipelineConfig cfg) {
  toml::table table;
  try {
    table = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw ConfigError(path.string() + ": " + std::string(e.description()));
  }
  const fs::path base = path.parent_path();
  for (const auto& [key_node, node] : table) {
    const std::string key(key_node.str());
    if (key == "dataset") {
      fs::path p = require<std::string>(node, key);
      cfg.dataset = p.is_relative() ? base / p : p;
    } else if (key == "format") {
      const auto name = require<std::string>(node, key);
      if (name == "csv") cfg.format = FileFormat::csv;
      else if (name == "jsonl") cfg.format = FileFormat::jsonl;
      else throw ConfigError("format must be csv or jsonl");
    } else if (key == "output_format") {
      const auto name = require<std::string>(node, key);
      if (name == "csv") cfg.output_format = FileFormat::csv;
      else if (name == "jsonl") cfg.output_format = FileFormat::jsonl;
      else throw ConfigError("output_format must be csv or jsonl");
    } else if (key == "schema") {
      const auto lang = parse_language(require<std::string>(node, key));
      if (!lang) throw ConfigError("schema must be java, python or pharo");
      cfg.language = *lang;
    } else if (key == "backend") {
      const auto name = require<std::string>(node, key);
      if (name == "native") cfg.backend = BackendKind::native;
      else if (name == "external") cfg.backend = BackendKind::external;
      else throw ConfigError("backend must be native or external");
    } else if (key == "endpoint") {
      cfg.endpoint = require<std::string>(node, key);
    } else if (key == "seed") {
      cfg.generation.seed = static_cast<std::uint64_t>(require<std::int64_t>(node, key));
    } else if (key == "qsynt") {
      cfg.qsynt = require<double>(node, key);
    } else if (key == "strategy") {
      const auto s = parse_strategy(require<std::string>(node, key));
      if (!s) throw ConfigError("strategy must be oversampling or augmentation");
      cfg.strategy = *s;
    } else if (key == "sweep") {
      const auto* arr = node.as_array();
      if (!arr) throw ConfigError("config key 'sweep' must be an array");
      cfg.sweep.clear();
      for (const auto& v : *arr) cfg.sweep.push_back(require<double>(v, key));
    } else if (key == "out") {
      fs::path p = require<std::string>(node, key);
      cfg.out = p.is_relative() ? base / p : p;
    } else if (key == "mask_ratio") {
      cfg.generation.mask_ratio = require<double>(node, key);
    } else if (key == "variants") {
      cfg.generation.variants_per_source = require_count(node, key);
    } else if (key == "top_k") {
      cfg.generation.top_k = require_count(node, key);
    } else if (key == "max_similarity") {
      cfg.generation.max_similarity = require<double>(node, key);
    } else if (key == "retry_budget") {
      cfg.generation.retry_budget = require_count(node, key);
    } else if (key == "threads") {
      cfg.generation.threads = require_count(node, key);
    } else if (key == "cap_multiplier") {
      cfg.cap_multiplier = require<double>(node, key);
    } else if (key == "batch_size") {
      cfg.batch_size = require_count(node, key);
    } else if (key == "text_report") {
      cfg.text_report = require<bool>(node, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

Backends make_backends(const PipelineConfig& cfg, const Dataset& d, bool need_fill, bool need_embed) {
  Backends b;
  if (cfg.backend == BackendKind::native) {
    if (need_fill) b.fill = std::make_unique<NativeFillBackend>(NativeFillBackend::train(d));
    if (need_embed) b.embed = std::make_unique<NativeEmbedBackend>(NativeEmbedBackend::build(d));
    return b;
  }
  auto client = std::make_shared<wire::Client>(wire::open_endpoint(cfg.endpoint));
  if (need_fill) b.fill = std::make_unique<wire::RemoteFillBackend>(client);
  if (need_embed) b.embed = std::make_unique<wire::RemoteEmbedBackend>(client);
  return b;
}

Dataset load_input(const PipelineConfig& cfg) {
  return staged("load", [&] {
    return load_dataset(cfg.dataset, cfg.input_format(), CategorySchema::builtin(cfg.language));
  });
}

std::string artifact::merged_dataset(Strategy s, double threshold, FileFormat format) {
  return "dsyo_" + std::string(to_string(s)) + "_q" + threshold_tag(threshold) +
         (format == FileFormat::csv ? ".csv" : ".jsonl");
}

std::string artifact::selection(Strategy s, double threshold) {
  return "selection_" + std::string(to_string(s)) + "_q" + threshold_tag(threshold) + ".json";
}

std::string fingerprint(const PipelineConfig& cfg) {
  const auto& g = cfg.generation;
  char buf[256];
  std::snprintf(buf, sizeof buf, "mask_ratio=%.6g variants=%zu top_k=%zu max_similarity=%.6g retry_budget=%zu seed=%llu",
                g.mask_ratio, g.variants_per_source, g.top_k, g.max_similarity, g.retry_budget,
                static_cast<unsigned long long>(g.seed));
  return std::string(buf) + " backend=" + (cfg.backend == BackendKind::native ? "native" : "external:" + cfg.endpoint);
}

std::vector<SyntheticSample> stage_generate(const PipelineConfig& cfg, const Dataset& d, const FillBackend& fill) {
  return staged("generate", [&] {
    ensure_out_dir(cfg.out);
    auto pool = generate_corpus(d, cfg.generation, fill);
    write_pool(pool, cfg.out / artifact::raw_pool);
    return pool;
  });
}

ScoredPool stage_score(const PipelineConfig& cfg, const Dataset& d, std::vector<SyntheticSample> pool,
                       const EmbedBackend& embed) {
  return staged("score", [&] {
    ensure_out_dir(cfg.out);
    ScoredPool scored = score_pool(std::move(pool), d, embed, cfg.batch_size, cfg.generation.threads);
    scored.fingerprint = fingerprint(cfg);
    write_pool(scored.samples, cfg.out / artifact::scored_pool);
    return scored;
  });
}

SelectionResult stage_select(const PipelineConfig& cfg, const Dataset& d, const ScoredPool& pool, double threshold) {
  return staged("select", [&] {
    ensure_out_dir(cfg.out);
    SelectionPolicy policy{cfg.strategy, threshold, std::nullopt};
    if (cfg.strategy == Strategy::oversampling) policy.targets = compute_targets(class_stats(d), cfg.cap_multiplier);
    SelectionResult result = select(pool, d, policy);
    const Dataset merged = merge(d, result);
    write_dataset(merged, cfg.out / artifact::merged_dataset(cfg.strategy, threshold, cfg.output_format),
                  cfg.output_format);
    write_text_file(cfg.out / artifact::selection(cfg.strategy, threshold), to_json(result).dump(2) + "\n");
    return result;
  });
}

RunReport stage_sweep(const PipelineConfig& cfg, const Dataset& d, const ScoredPool& pool) {
  RunReport report;
  report.language = std::string(to_string(d.schema.language()));
  report.fingerprint = pool.fingerprint.empty() ? fingerprint(cfg) : pool.fingerprint;
  report.originals = d.size();
  report.pool = staged("report", [&] { return report_stats(pool); });

  std::vector<double> thresholds = cfg.thresholds();
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  for (double t : thresholds) {
    const SelectionResult result = stage_select(cfg, d, pool, t);
    ThresholdReport tr = threshold_report(d, result);
    tr.dataset_file = artifact::merged_dataset(cfg.strategy, t, cfg.output_format);
    report.thresholds.push_back(std::move(tr));
  }

  staged("report", [&] {
    write_text_file(cfg.out / artifact::report_json, to_json(report).dump(2) + "\n");
    if (cfg.text_report) write_text_file(cfg.out / artifact::report_text, render_text(report));
    return 0;
  });
  return report;
}

RunReport run(const PipelineConfig& cfg) {
  staged("config", [&] {
    cfg.validate();
    return 0;
  });
  const Dataset d = load_input(cfg);
  Backends backends = staged("backend", [&] { return make_backends(cfg, d, true, true); });
  auto pool = stage_generate(cfg, d, *backends.fill);
  const ScoredPool scored = stage_score(cfg, d, std::move(pool), *backends.embed);
  return stage_sweep(cfg, d, scored);
}

}  // namespace qsynth
