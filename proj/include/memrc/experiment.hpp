#pragma once

// Experiment engine. Feature extraction is performed once per image and
// cached: the reservoir has no trainable parameters, so its response to an
// image is static and re-simulating it per epoch would be pure waste. Raw
// read currents are cached per preprocessing spec and shared by every
// quantization width in the sweep.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "memrc/config.hpp"
#include "memrc/dataset.hpp"
#include "memrc/device.hpp"
#include "memrc/metrics.hpp"
#include "memrc/preprocess.hpp"
#include "memrc/readout.hpp"
#include "memrc/reservoir.hpp"
#include "memrc/rng.hpp"

namespace memrc {

struct CostTotals {
  double write_energy = 0.0;
  double read_energy = 0.0;
  double wall_time = 0.0;
  std::size_t images = 0;

  double total_energy() const { return write_energy + read_energy; }
  double write_fraction() const {
    const double total = total_energy();
    return total > 0.0 ? write_energy / total : 0.0;
  }

  CostTotals& operator+=(const CostTotals& o) {
    write_energy += o.write_energy;
    read_energy += o.read_energy;
    wall_time += o.wall_time;
    images += o.images;
    return *this;
  }
};

// Raw (unquantized) read currents for every image of a set under one
// preprocessing spec, plus the accumulated reservoir cost.
struct CurrentsSet {
  int dim = 0;
  std::vector<double> values;  // count x dim, row-major
  std::vector<std::uint8_t> labels;
  CostTotals cost;

  std::size_t count() const { return labels.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

namespace detail {

inline int resolve_workers(int requested, std::size_t jobs) {
  int w = requested > 0
              ? requested
              : static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (static_cast<std::size_t>(w) > jobs) w = static_cast<int>(jobs);
  return w;
}

}  // namespace detail

// Pushes every image through a fresh reservoir and collects the raw read
// currents. Parallel over images; per-image costs are reduced in image
// order so totals do not depend on the thread count.
inline CurrentsSet extract_currents(const LabeledImageSet& data,
                                    const PreprocessSpec& spec,
                                    const DeviceParams& params,
                                    int workers = 1) {
  spec.validate();
  params.validate();
  const std::size_t n = data.count();
  if (n == 0) throw std::invalid_argument("extract: empty dataset");
  const std::size_t dim = reservoir_size(spec, data.rows, data.cols);

  CurrentsSet out;
  out.dim = static_cast<int>(dim);
  out.labels = data.labels;
  out.values.resize(n * dim);
  std::vector<ImageCost> costs(n);

  const int nthreads = detail::resolve_workers(workers, n);
  auto worker = [&](std::size_t begin, std::size_t end) {
    ReservoirBank bank(dim, params);
    for (std::size_t i = begin; i < end; ++i) {
      const BinaryImage binary = binarize(data.gray(i), spec.threshold);
      const auto trains = make_pulse_trains(binary, spec);
      auto [currents, cost] = bank.process(trains);
      std::copy(currents.begin(), currents.end(),
                out.values.begin() + i * dim);
      costs[i] = cost;
    }
  };

  if (nthreads <= 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(nthreads);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const std::size_t begin = static_cast<std::size_t>(t) * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      threads.emplace_back([&, t, begin, end] {
        try {
          worker(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const auto& c : costs) {
    out.cost.write_energy += c.write_energy;
    out.cost.read_energy += c.read_energy;
    out.cost.wall_time += c.wall_time;
  }
  out.cost.images = n;
  return out;
}

inline std::pair<double, double> currents_range(const CurrentsSet& currents) {
  if (currents.values.empty()) {
    throw std::invalid_argument("currents_range: empty set");
  }
  double lo = currents.values[0], hi = currents.values[0];
  for (double v : currents.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

// Per-image min-max quantization of a whole set.
inline FeatureSet quantize_set(const CurrentsSet& currents, int bits) {
  FeatureSet out;
  out.dim = currents.dim;
  out.labels = currents.labels;
  out.values.reserve(currents.values.size());
  for (std::size_t i = 0; i < currents.count(); ++i) {
    FeatureVector fv = quantize_rescale(currents.sample(i), bits);
    out.values.insert(out.values.end(), fv.values.begin(), fv.values.end());
  }
  return out;
}

// Fixed-range (globally calibrated) variant.
inline FeatureSet quantize_set(const CurrentsSet& currents, int bits,
                               double lo, double hi) {
  FeatureSet out;
  out.dim = currents.dim;
  out.labels = currents.labels;
  out.values.reserve(currents.values.size());
  for (std::size_t i = 0; i < currents.count(); ++i) {
    FeatureVector fv = quantize_rescale(currents.sample(i), bits, lo, hi);
    out.values.insert(out.values.end(), fv.values.begin(), fv.values.end());
  }
  return out;
}

// Seeds are derived from the configuration content, never from execution
// order, so a point's result is identical whether it runs alone or inside
// a sweep, serially or in parallel.
inline std::uint64_t point_seed(std::uint64_t base, std::string_view purpose,
                                const RunSetting& setting) {
  std::uint64_t h = fold_seed(base, purpose);
  h = fold_seed(h, setting.spec.method_name());
  h = fold_seed(h, static_cast<std::uint64_t>(setting.spec.sections));
  h = fold_seed(h, static_cast<std::uint64_t>(setting.bits));
  return h;
}

struct PointResult {
  ExperimentReport report;
  ReadoutModel model;
};

// Trains and evaluates one grid point on pre-extracted currents.
inline PointResult run_point(const CurrentsSet& train_currents,
                             const CurrentsSet& test_currents,
                             const RunSetting& setting,
                             const ExperimentConfig& cfg, int image_rows,
                             int image_cols) {
  FeatureSet train_features, test_features;
  if (cfg.range_mode == RangeMode::kGlobal) {
    const auto [lo, hi] = currents_range(train_currents);
    train_features = quantize_set(train_currents, setting.bits, lo, hi);
    test_features = quantize_set(test_currents, setting.bits, lo, hi);
  } else {
    train_features = quantize_set(train_currents, setting.bits);
    test_features = quantize_set(test_currents, setting.bits);
  }

  constexpr int kClasses = 10;
  ReadoutModel model = ReadoutModel::random_init(
      train_features.dim, kClasses, point_seed(cfg.seed, "readout-init", setting));
  TrainConfig tc = cfg.train;
  tc.seed = point_seed(cfg.seed, "train-order", setting);
  train(model, train_features, tc);

  PointResult result{ExperimentReport{}, std::move(model)};
  ExperimentReport& r = result.report;
  r.spec = setting.spec;
  r.bits = setting.bits;
  r.accuracy = evaluate(result.model, test_features);
  r.images_per_second =
      throughput(setting.spec, image_rows, image_cols, cfg.device);
  CostTotals total = train_currents.cost;
  total += test_currents.cost;
  r.images_per_joule = energy_efficiency(total.total_energy(), total.images);
  r.device_count = area(setting.spec, image_rows, image_cols);
  r.write_energy_fraction = total.write_fraction();
  r.epochs = cfg.train.epochs;
  r.learning_rate = cfg.train.learning_rate;
  r.seed = cfg.seed;
  return result;
}

// Runs the full Cartesian grid. Points sharing a preprocessing spec reuse
// one extraction; spec groups run in parallel up to the worker budget, with
// leftover workers given to in-group image parallelism.
inline std::vector<PointResult> run_grid(const ExperimentConfig& cfg,
                                         const LabeledImageSet& train_set,
                                         const LabeledImageSet& test_set) {
  const std::vector<RunSetting> points = cfg.grid();
  if (points.empty()) throw std::invalid_argument("run_grid: empty grid");

  // Grid order keeps equal specs adjacent (bits is the innermost axis).
  struct Group {
    PreprocessSpec spec;
    std::vector<std::size_t> point_indices;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& spec = points[i].spec;
    if (groups.empty() || groups.back().spec.dimension != spec.dimension ||
        groups.back().spec.parity != spec.parity ||
        groups.back().spec.sections != spec.sections) {
      groups.push_back({spec, {}});
    }
    groups.back().point_indices.push_back(i);
  }

  std::vector<PointResult> results(points.size(),
                                   PointResult{{}, ReadoutModel(1, 1)});
  const int group_workers = detail::resolve_workers(cfg.workers, groups.size());
  const int extract_workers = std::max(
      1, detail::resolve_workers(cfg.workers, train_set.count()) / group_workers);

  auto run_group = [&](const Group& group) {
    const CurrentsSet train_currents = extract_currents(
        train_set, group.spec, cfg.device, extract_workers);
    const CurrentsSet test_currents =
        extract_currents(test_set, group.spec, cfg.device, extract_workers);
    for (std::size_t idx : group.point_indices) {
      results[idx] = run_point(train_currents, test_currents, points[idx], cfg,
                               train_set.rows, train_set.cols);
    }
  };

  if (group_workers <= 1) {
    for (const auto& g : groups) run_group(g);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(groups.size());
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < group_workers; ++t) {
      threads.emplace_back([&] {
        for (;;) {
          const std::size_t g = next.fetch_add(1);
          if (g >= groups.size()) return;
          try {
            run_group(groups[g]);
          } catch (...) {
            errors[g] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return results;
}

// Loads the four IDX files and applies seeded subsetting. The subsets
// depend only on the base seed, so every grid point sees the same data.
inline std::pair<LabeledImageSet, LabeledImageSet> load_experiment_data(
    const ExperimentConfig& cfg) {
  LabeledImageSet train =
      load_idx(cfg.dataset.train_images, cfg.dataset.train_labels);
  LabeledImageSet test =
      load_idx(cfg.dataset.test_images, cfg.dataset.test_labels);
  if (cfg.subset_train > 0) {
    train = subset(train, cfg.subset_train, fold_seed(cfg.seed, "subset-train"));
  }
  if (cfg.subset_test > 0) {
    test = subset(test, cfg.subset_test, fold_seed(cfg.seed, "subset-test"));
  }
  return {std::move(train), std::move(test)};
}

}  // namespace memrc
