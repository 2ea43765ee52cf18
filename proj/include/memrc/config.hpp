#pragma once

// Declarative experiment configuration. A config is a versioned JSON
// document; dimension/parity/sections/bits may be single values or lists,
// and their Cartesian product forms the sweep grid. Unknown keys are
// rejected so that typos cannot silently fall back to defaults.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "memrc/device.hpp"
#include "memrc/preprocess.hpp"
#include "memrc/readout.hpp"

namespace memrc {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class RangeMode { kPerImage, kGlobal };

struct DatasetPaths {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

// One grid point: a preprocessing spec plus a quantization width.
struct RunSetting {
  PreprocessSpec spec;
  int bits = 6;
};

struct ExperimentConfig {
  DatasetPaths dataset;
  std::size_t subset_train = 0;  // 0 = full set
  std::size_t subset_test = 0;
  std::vector<Dimension> dimensions{Dimension::kOneD};
  std::vector<bool> parity{false};
  std::vector<int> sections{1};
  int threshold = 25;
  std::vector<int> bits{6};
  RangeMode range_mode = RangeMode::kPerImage;
  DeviceParams device;
  TrainConfig train;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  void validate() const;

  // Fixed expansion order: dimension, then parity, then sections, then bits.
  std::vector<RunSetting> grid() const {
    std::vector<RunSetting> points;
    for (Dimension d : dimensions) {
      for (bool p : parity) {
        for (int k : sections) {
          for (int b : bits) {
            points.push_back({PreprocessSpec{d, p, k, threshold}, b});
          }
        }
      }
    }
    return points;
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::string& scope,
                                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ConfigError("config: unknown key '" +
                        (scope.empty() ? key : scope + "." + key) + "'");
    }
  }
}

template <class T>
T get_or(const nlohmann::json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

// Accepts either a scalar or an array of scalars.
template <class T>
std::vector<T> get_list(const nlohmann::json& obj, const char* key,
                        std::vector<T> fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

inline Dimension parse_dimension(const std::string& s) {
  if (s == "1d") return Dimension::kOneD;
  if (s == "2d") return Dimension::kTwoD;
  throw ConfigError("config: dimension must be \"1d\" or \"2d\", got \"" + s + "\"");
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  using detail::get_list;
  using detail::get_or;
  using detail::reject_unknown_keys;

  if (!j.is_object()) throw ConfigError("config: root must be an object");
  reject_unknown_keys(j, "",
                      {"schema_version", "dataset", "subset", "preprocess",
                       "quantization", "device", "train", "seed", "workers"});
  const int version = get_or<int>(j, "schema_version", 0);
  if (version != 1) {
    throw ConfigError("config: schema_version must be 1");
  }

  ExperimentConfig cfg;

  if (!j.contains("dataset") || !j.at("dataset").is_object()) {
    throw ConfigError("config: missing dataset section");
  }
  const auto& ds = j.at("dataset");
  reject_unknown_keys(ds, "dataset",
                      {"train_images", "train_labels", "test_images", "test_labels"});
  cfg.dataset.train_images = get_or<std::string>(ds, "train_images", "");
  cfg.dataset.train_labels = get_or<std::string>(ds, "train_labels", "");
  cfg.dataset.test_images = get_or<std::string>(ds, "test_images", "");
  cfg.dataset.test_labels = get_or<std::string>(ds, "test_labels", "");

  if (j.contains("subset")) {
    const auto& sub = j.at("subset");
    reject_unknown_keys(sub, "subset", {"train", "test"});
    cfg.subset_train = get_or<std::size_t>(sub, "train", 0);
    cfg.subset_test = get_or<std::size_t>(sub, "test", 0);
  }

  if (j.contains("preprocess")) {
    const auto& pp = j.at("preprocess");
    reject_unknown_keys(pp, "preprocess",
                        {"dimension", "parity", "sections", "threshold"});
    auto dim_names = get_list<std::string>(pp, "dimension", {"1d"});
    cfg.dimensions.clear();
    for (const auto& name : dim_names) {
      cfg.dimensions.push_back(detail::parse_dimension(name));
    }
    cfg.parity = get_list<bool>(pp, "parity", {false});
    cfg.sections = get_list<int>(pp, "sections", {1});
    cfg.threshold = get_or<int>(pp, "threshold", 25);
  }

  if (j.contains("quantization")) {
    const auto& q = j.at("quantization");
    reject_unknown_keys(q, "quantization", {"bits", "range"});
    cfg.bits = get_list<int>(q, "bits", {6});
    const auto range = get_or<std::string>(q, "range", "per_image");
    if (range == "per_image") {
      cfg.range_mode = RangeMode::kPerImage;
    } else if (range == "global") {
      cfg.range_mode = RangeMode::kGlobal;
    } else {
      throw ConfigError("config: quantization.range must be \"per_image\" or \"global\"");
    }
  }

  if (j.contains("device")) {
    const auto& dev = j.at("device");
    reject_unknown_keys(dev, "device",
                        {"alpha", "beta", "gamma", "delta", "lambda", "eta",
                         "tau", "w_min", "w_max", "v_write", "v_read", "t_pulse"});
    cfg.device.alpha = get_or<double>(dev, "alpha", cfg.device.alpha);
    cfg.device.beta = get_or<double>(dev, "beta", cfg.device.beta);
    cfg.device.gamma = get_or<double>(dev, "gamma", cfg.device.gamma);
    cfg.device.delta = get_or<double>(dev, "delta", cfg.device.delta);
    cfg.device.lambda = get_or<double>(dev, "lambda", cfg.device.lambda);
    cfg.device.eta = get_or<double>(dev, "eta", cfg.device.eta);
    cfg.device.tau = get_or<double>(dev, "tau", cfg.device.tau);
    cfg.device.w_min = get_or<double>(dev, "w_min", cfg.device.w_min);
    cfg.device.w_max = get_or<double>(dev, "w_max", cfg.device.w_max);
    cfg.device.v_write = get_or<double>(dev, "v_write", cfg.device.v_write);
    cfg.device.v_read = get_or<double>(dev, "v_read", cfg.device.v_read);
    cfg.device.t_pulse = get_or<double>(dev, "t_pulse", cfg.device.t_pulse);
  }

  if (j.contains("train")) {
    const auto& tr = j.at("train");
    reject_unknown_keys(tr, "train", {"epochs", "learning_rate", "shuffle"});
    cfg.train.epochs = get_or<int>(tr, "epochs", cfg.train.epochs);
    cfg.train.learning_rate =
        get_or<double>(tr, "learning_rate", cfg.train.learning_rate);
    cfg.train.shuffle = get_or<bool>(tr, "shuffle", cfg.train.shuffle);
  }

  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.workers = get_or<int>(j, "workers", 0);

  cfg.validate();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: JSON parse error in " + path.string() + ": " +
                      e.what());
  }
  return from_json(j);
}

inline void ExperimentConfig::validate() const {
  if (dataset.train_images.empty() || dataset.train_labels.empty() ||
      dataset.test_images.empty() || dataset.test_labels.empty()) {
    throw ConfigError("config: all four dataset paths are required");
  }
  if (dimensions.empty() || parity.empty() || sections.empty() || bits.empty()) {
    throw ConfigError("config: preprocess/quantization lists must be non-empty");
  }
  for (int k : sections) {
    if (k < 1) throw ConfigError("config: sections must be >= 1");
  }
  if (threshold < 0 || threshold > 255) {
    throw ConfigError("config: threshold must be in [0, 255]");
  }
  for (int b : bits) {
    if (b < 1 || b > 7) throw ConfigError("config: bits must be in [1, 7]");
  }
  try {
    device.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (workers < 0) throw ConfigError("config: workers must be >= 0");
}

}  // namespace memrc
