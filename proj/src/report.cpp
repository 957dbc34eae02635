// SPDX-License-Identifier: Apache-2.0
#include "qsynth/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qsynth/error.hpp"
#include "qsynth/text.hpp"

namespace qsynth {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Minimal column-aligned table writer.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::vector<std::size_t> width(rows_.front().size(), 0);
    for (const auto& row : rows_)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    std::ostringstream out;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      for (std::size_t c = 0; c < rows_[r].size(); ++c) {
        if (c) out << "  ";
        const auto& cell = rows_[r][c];
        if (c == 0) {
          out << cell << std::string(width[c] - cell.size(), ' ');
        } else {
          out << std::string(width[c] - cell.size(), ' ') << cell;
        }
      }
      out << '\n';
      if (r == 0) {
        std::size_t total = 0;
        for (auto w : width) total += w;
        out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
      }
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace

std::size_t quality_bin(double q) {
  const auto bin = static_cast<std::size_t>(std::floor(std::clamp(q, 0.0, 1.0) / PoolReport::bin_width));
  return std::min(bin, PoolReport::bins - 1);
}

PoolReport report_stats(const ScoredPool& pool) {
  PoolReport r;
  r.size = pool.samples.size();
  r.quality_histogram.assign(PoolReport::bins, 0);
  std::map<std::size_t, std::pair<std::size_t, double>> by_length;
  double sum = 0.0;
  for (const auto& s : pool.samples) {
    if (!s.quality) throw DataError(0, "pool report needs scored samples");
    const double q = *s.quality;
    sum += q;
    r.degraded += s.degraded ? 1 : 0;
    ++r.quality_histogram[quality_bin(q)];
    const std::size_t len = tokenize(s.text).size();
    ++r.length_histogram[len];
    auto& acc = by_length[len];
    ++acc.first;
    acc.second += q;
  }
  r.mean_quality = r.size ? sum / static_cast<double>(r.size) : 0.0;
  for (const auto& [len, acc] : by_length)
    r.length_quality.push_back({len, acc.first, acc.second / static_cast<double>(acc.first)});
  return r;
}

ThresholdReport threshold_report(const Dataset& original, const SelectionResult& result) {
  ThresholdReport t;
  t.strategy = result.strategy;
  t.threshold = result.threshold;
  t.selected = result.selected.size();
  t.degraded_selected = result.degraded_selected;
  t.synthetic_fraction = result.synthetic_fraction;
  const ClassStats before = class_stats(original);
  for (std::size_t c = 0; c < result.categories.size(); ++c) {
    t.categories.push_back({result.categories[c].category, before.categories[c].ratio,
                            result.merged_stats.categories[c].ratio, result.categories[c].added,
                            result.categories[c].target});
  }
  return t;
}

nlohmann::ordered_json to_json(const ClassStats& stats) {
  nlohmann::ordered_json j;
  j["total"] = stats.total;
  j["categories"] = nlohmann::ordered_json::array();
  for (const auto& c : stats.categories)
    j["categories"].push_back({{"category", c.category}, {"positives", c.positives}, {"ratio", c.ratio}});
  return j;
}

nlohmann::ordered_json to_json(const SelectionResult& result) {
  nlohmann::ordered_json j;
  j["strategy"] = to_string(result.strategy);
  j["threshold"] = result.threshold;
  j["selected"] = result.selected.size();
  j["degraded_selected"] = result.degraded_selected;
  j["synthetic_fraction"] = result.synthetic_fraction;
  j["categories"] = nlohmann::ordered_json::array();
  for (const auto& c : result.categories) {
    nlohmann::ordered_json cj{{"category", c.category}, {"original", c.original}, {"added", c.added}};
    cj["target"] = c.target ? nlohmann::ordered_json(*c.target) : nlohmann::ordered_json(nullptr);
    cj["met"] = c.met();
    j["categories"].push_back(std::move(cj));
  }
  j["merged_stats"] = to_json(result.merged_stats);
  j["selected_ids"] = nlohmann::ordered_json::array();
  for (const auto& s : result.selected) j["selected_ids"].push_back(synthetic_id(s));
  return j;
}

nlohmann::ordered_json to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["language"] = report.language;
  j["fingerprint"] = report.fingerprint;
  j["originals"] = report.originals;

  auto& p = j["pool"];
  p["size"] = report.pool.size;
  p["degraded"] = report.pool.degraded;
  p["mean_quality"] = report.pool.mean_quality;
  p["quality_bin_width"] = PoolReport::bin_width;
  p["quality_histogram"] = report.pool.quality_histogram;
  p["length_histogram"] = nlohmann::ordered_json::array();
  for (const auto& [len, count] : report.pool.length_histogram)
    p["length_histogram"].push_back({{"tokens", len}, {"count", count}});
  p["length_quality"] = nlohmann::ordered_json::array();
  for (const auto& lq : report.pool.length_quality)
    p["length_quality"].push_back({{"tokens", lq.tokens}, {"count", lq.count}, {"mean_quality", lq.mean_quality}});

  j["thresholds"] = nlohmann::ordered_json::array();
  for (const auto& t : report.thresholds) {
    nlohmann::ordered_json tj;
    tj["strategy"] = to_string(t.strategy);
    tj["threshold"] = t.threshold;
    tj["selected"] = t.selected;
    tj["degraded_selected"] = t.degraded_selected;
    tj["synthetic_fraction"] = t.synthetic_fraction;
    tj["dataset_file"] = t.dataset_file;
    tj["categories"] = nlohmann::ordered_json::array();
    for (const auto& c : t.categories) {
      nlohmann::ordered_json cj{{"category", c.category},
                                {"ratio_before", c.ratio_before},
                                {"ratio_after", c.ratio_after},
                                {"added", c.added}};
      cj["target"] = c.target ? nlohmann::ordered_json(*c.target) : nlohmann::ordered_json(nullptr);
      tj["categories"].push_back(std::move(cj));
    }
    j["thresholds"].push_back(std::move(tj));
  }
  return j;
}

std::string render_text(const ClassStats& stats) {
  Table t({"category", "positives", "ratio"});
  for (const auto& c : stats.categories) t.add({c.category, std::to_string(c.positives), fixed(c.ratio)});
  return "items: " + std::to_string(stats.total) + "\n" + t.str();
}

std::string render_text(const RunReport& report) {
  std::ostringstream out;
  out << "language: " << report.language << "\noriginals: " << report.originals << "\npool size: " << report.pool.size
      << "\ndegraded: " << report.pool.degraded << "\nmean quality: " << fixed(report.pool.mean_quality) << "\n\n";

  Table q({"quality bin", "count"});
  for (std::size_t b = 0; b < PoolReport::bins; ++b)
    q.add({"[" + fixed(b * PoolReport::bin_width, 2) + ", " + fixed((b + 1) * PoolReport::bin_width, 2) +
               (b + 1 == PoolReport::bins ? "]" : ")"),
           std::to_string(report.pool.quality_histogram[b])});
  out << q.str() << '\n';

  Table lq({"tokens", "count", "mean q"});
  for (const auto& row : report.pool.length_quality)
    lq.add({std::to_string(row.tokens), std::to_string(row.count), fixed(row.mean_quality)});
  out << lq.str() << '\n';

  Table sweep({"strategy", "threshold", "selected", "degraded", "synthetic fraction", "min ratio before",
               "min ratio after"});
  for (const auto& t : report.thresholds) {
    double before = 1.0, after = 1.0;
    for (const auto& c : t.categories) {
      before = std::min(before, c.ratio_before);
      after = std::min(after, c.ratio_after);
    }
    sweep.add({std::string(to_string(t.strategy)), fixed(t.threshold, 3), std::to_string(t.selected),
               std::to_string(t.degraded_selected), fixed(t.synthetic_fraction), fixed(before), fixed(after)});
  }
  out << sweep.str();

  for (const auto& t : report.thresholds) {
    out << '\n' << to_string(t.strategy) << " @ " << fixed(t.threshold, 3) << '\n';
    Table cats({"category", "ratio before", "ratio after", "added", "target"});
    for (const auto& c : t.categories)
      cats.add({c.category, fixed(c.ratio_before), fixed(c.ratio_after), std::to_string(c.added),
                c.target ? std::to_string(*c.target) : "-"});
    out << cats.str();
  }
  return out.str();
}

}  // namespace qsynth
