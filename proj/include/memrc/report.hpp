#pragma once

// Report serialization: reports.csv / reports.json plus the plot-ready
// tables behind the accuracy / throughput / efficiency / area figures.
// Output is deterministic for a fixed (config, seed): no timestamps, fixed
// column order, fixed number formatting.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "memrc/config.hpp"
#include "memrc/experiment.hpp"
#include "memrc/metrics.hpp"

namespace memrc {

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::string report_row(const ExperimentReport& r) {
  std::string row;
  row += r.spec.method_name();
  row += ',' + std::to_string(r.spec.sections);
  row += ',' + std::to_string(r.bits);
  row += ',' + fmt("%.6f", r.accuracy);
  row += ',' + fmt("%.9e", r.images_per_second);
  row += ',' + fmt("%.9e", r.images_per_joule);
  row += ',' + std::to_string(r.device_count);
  row += ',' + fmt("%.9f", r.write_energy_fraction);
  row += ',' + std::to_string(r.epochs);
  row += ',' + fmt("%.9g", r.learning_rate);
  row += ',' + std::to_string(r.seed);
  return row;
}

// Plot tables are sorted by accuracy descending with a deterministic
// tie-break so identical runs emit identical bytes.
inline std::vector<const ExperimentReport*> by_accuracy_desc(
    std::span<const ExperimentReport> reports) {
  std::vector<const ExperimentReport*> sorted;
  sorted.reserve(reports.size());
  for (const auto& r : reports) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const ExperimentReport* a, const ExperimentReport* b) {
              if (a->accuracy != b->accuracy) return a->accuracy > b->accuracy;
              if (auto an = a->spec.method_name(), bn = b->spec.method_name();
                  an != bn) {
                return an < bn;
              }
              if (a->spec.sections != b->spec.sections) {
                return a->spec.sections < b->spec.sections;
              }
              return a->bits < b->bits;
            });
  return sorted;
}

}  // namespace detail

inline std::string reports_to_csv(std::span<const ExperimentReport> reports) {
  std::string csv =
      "method,sections,bits,accuracy,images_per_second,images_per_joule,"
      "device_count,write_energy_fraction,epochs,learning_rate,seed\n";
  for (const auto& r : reports) csv += detail::report_row(r) + '\n';
  return csv;
}

// Master plot table: every metric column, sorted by accuracy descending.
inline std::string accuracy_table_csv(std::span<const ExperimentReport> reports) {
  std::string csv =
      "method,sections,bits,accuracy,images_per_second,images_per_joule,"
      "device_count\n";
  for (const auto* r : detail::by_accuracy_desc(reports)) {
    csv += r->spec.method_name() + ',' + std::to_string(r->spec.sections) +
           ',' + std::to_string(r->bits) + ',' + detail::fmt("%.6f", r->accuracy) +
           ',' + detail::fmt("%.9e", r->images_per_second) + ',' +
           detail::fmt("%.9e", r->images_per_joule) + ',' +
           std::to_string(r->device_count) + '\n';
  }
  return csv;
}

// Scatter table of accuracy against one metric column.
enum class ScatterMetric { kThroughput, kEfficiency, kArea };

inline std::string scatter_table_csv(std::span<const ExperimentReport> reports,
                                     ScatterMetric metric) {
  const char* column = metric == ScatterMetric::kThroughput ? "images_per_second"
                       : metric == ScatterMetric::kEfficiency ? "images_per_joule"
                                                              : "device_count";
  std::string csv = std::string("method,sections,bits,accuracy,") + column + '\n';
  for (const auto* r : detail::by_accuracy_desc(reports)) {
    csv += r->spec.method_name() + ',' + std::to_string(r->spec.sections) +
           ',' + std::to_string(r->bits) + ',' + detail::fmt("%.6f", r->accuracy);
    switch (metric) {
      case ScatterMetric::kThroughput:
        csv += ',' + detail::fmt("%.9e", r->images_per_second);
        break;
      case ScatterMetric::kEfficiency:
        csv += ',' + detail::fmt("%.9e", r->images_per_joule);
        break;
      case ScatterMetric::kArea:
        csv += ',' + std::to_string(r->device_count);
        break;
    }
    csv += '\n';
  }
  return csv;
}

inline nlohmann::json report_to_json(const ExperimentReport& r) {
  return nlohmann::json{
      {"method", r.spec.method_name()},
      {"sections", r.spec.sections},
      {"bits", r.bits},
      {"accuracy", r.accuracy},
      {"images_per_second", r.images_per_second},
      {"images_per_joule", r.images_per_joule},
      {"device_count", r.device_count},
      {"write_energy_fraction", r.write_energy_fraction},
      {"epochs", r.epochs},
      {"learning_rate", r.learning_rate},
      {"seed", r.seed},
  };
}

// Pairwise accuracy deltas: parity-on vs parity-off per (dimension,
// sections, bits) base, and 2D vs 1D per (parity, sections, bits) base.
inline nlohmann::json sweep_deltas(std::span<const ExperimentReport> reports) {
  nlohmann::json parity_gain = nlohmann::json::array();
  nlohmann::json dimension_gain = nlohmann::json::array();
  auto find = [&](Dimension d, bool parity, int sections,
                  int bits) -> const ExperimentReport* {
    for (const auto& r : reports) {
      if (r.spec.dimension == d && r.spec.parity == parity &&
          r.spec.sections == sections && r.bits == bits) {
        return &r;
      }
    }
    return nullptr;
  };
  for (const auto& r : reports) {
    if (r.spec.parity) {
      if (const auto* base =
              find(r.spec.dimension, false, r.spec.sections, r.bits)) {
        parity_gain.push_back(
            {{"dimension",
              r.spec.dimension == Dimension::kOneD ? "1d" : "2d"},
             {"sections", r.spec.sections},
             {"bits", r.bits},
             {"base_accuracy", base->accuracy},
             {"parity_accuracy", r.accuracy},
             {"delta", r.accuracy - base->accuracy}});
      }
    }
    if (r.spec.dimension == Dimension::kTwoD) {
      if (const auto* base =
              find(Dimension::kOneD, r.spec.parity, r.spec.sections, r.bits)) {
        dimension_gain.push_back({{"parity", r.spec.parity},
                                  {"sections", r.spec.sections},
                                  {"bits", r.bits},
                                  {"one_d_accuracy", base->accuracy},
                                  {"two_d_accuracy", r.accuracy},
                                  {"delta", r.accuracy - base->accuracy}});
      }
    }
  }
  return nlohmann::json{{"parity_gain", parity_gain},
                        {"dimension_gain", dimension_gain}};
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json dims = nlohmann::json::array();
  for (Dimension d : cfg.dimensions) {
    dims.push_back(d == Dimension::kOneD ? "1d" : "2d");
  }
  return nlohmann::json{
      {"dataset",
       {{"train_images", cfg.dataset.train_images},
        {"train_labels", cfg.dataset.train_labels},
        {"test_images", cfg.dataset.test_images},
        {"test_labels", cfg.dataset.test_labels}}},
      {"subset", {{"train", cfg.subset_train}, {"test", cfg.subset_test}}},
      {"preprocess",
       {{"dimension", dims},
        {"parity", cfg.parity},
        {"sections", cfg.sections},
        {"threshold", cfg.threshold}}},
      {"quantization",
       {{"bits", cfg.bits},
        {"range",
         cfg.range_mode == RangeMode::kPerImage ? "per_image" : "global"}}},
      {"train",
       {{"epochs", cfg.train.epochs},
        {"learning_rate", cfg.train.learning_rate},
        {"shuffle", cfg.train.shuffle}}},
      {"seed", cfg.seed},
  };
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

inline std::string weights_filename(const ExperimentReport& r) {
  std::string method = r.spec.method_name();
  std::replace(method.begin(), method.end(), '+', '_');
  return "weights_" + method + "_k" + std::to_string(r.spec.sections) + "_b" +
         std::to_string(r.bits) + ".bin";
}

// Writes reports.csv / reports.json, the four plot tables, and one weight
// artifact per grid point.
inline void write_run_artifacts(const std::filesystem::path& out_dir,
                                const ExperimentConfig& cfg,
                                std::span<const PointResult> results) {
  std::filesystem::create_directories(out_dir);
  std::vector<ExperimentReport> reports;
  reports.reserve(results.size());
  for (const auto& pr : results) reports.push_back(pr.report);

  write_text_file(out_dir / "reports.csv", reports_to_csv(reports));

  nlohmann::json j{{"config", config_to_json(cfg)},
                   {"reports", nlohmann::json::array()},
                   {"deltas", sweep_deltas(reports)}};
  for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
  write_text_file(out_dir / "reports.json", j.dump(2) + "\n");

  write_text_file(out_dir / "accuracy_by_method.csv", accuracy_table_csv(reports));
  write_text_file(out_dir / "accuracy_vs_throughput.csv",
                  scatter_table_csv(reports, ScatterMetric::kThroughput));
  write_text_file(out_dir / "accuracy_vs_efficiency.csv",
                  scatter_table_csv(reports, ScatterMetric::kEfficiency));
  write_text_file(out_dir / "accuracy_vs_area.csv",
                  scatter_table_csv(reports, ScatterMetric::kArea));

  for (const auto& pr : results) {
    pr.model.save(out_dir / weights_filename(pr.report));
  }
}

}  // namespace memrc
