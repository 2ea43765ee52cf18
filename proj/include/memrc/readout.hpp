#pragma once

// Trainable perceptron readout: per-class sigmoid outputs over a weight
// matrix, binary-cross-entropy gradient, per-sample SGD. This is the only
// trainable part of the system.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "memrc/rng.hpp"

namespace memrc {

// Flat row-major sample store: values[i * dim .. (i+1) * dim) is sample i.
struct FeatureSet {
  int dim = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;

  std::size_t count() const { return labels.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

struct TrainConfig {
  int epochs = 500;
  double learning_rate = 0.02;
  bool shuffle = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (!(learning_rate > 0.0)) {
      throw std::invalid_argument("train: learning rate must be > 0");
    }
  }
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

class ReadoutModel {
 public:
  ReadoutModel(int features, int classes)
      : features_(features), classes_(classes) {
    if (features < 1 || classes < 1) {
      throw std::invalid_argument("readout: features and classes must be >= 1");
    }
    weights_.assign(static_cast<std::size_t>(features) * classes, 0.0);
  }

  // Weights i.i.d. uniform on [-0.01, 0.01]; reproducible given the seed.
  static ReadoutModel random_init(int features, int classes,
                                  std::uint64_t seed) {
    ReadoutModel m(features, classes);
    Rng rng(seed);
    for (auto& w : m.weights_) w = rng.uniform(-0.01, 0.01);
    return m;
  }

  int features() const { return features_; }
  int classes() const { return classes_; }
  std::span<const double> weights() const { return weights_; }

  double& at(int feature, int cls) {
    return weights_[static_cast<std::size_t>(feature) * classes_ + cls];
  }
  double at(int feature, int cls) const {
    return weights_[static_cast<std::size_t>(feature) * classes_ + cls];
  }

  // y_c = sigmoid(sum_i W[i][c] * x_i). Per-class sigmoid, no softmax
  // normalization.
  void forward_into(std::span<const double> x, std::span<double> out) const {
    if (x.size() != static_cast<std::size_t>(features_) ||
        out.size() != static_cast<std::size_t>(classes_)) {
      throw std::invalid_argument("forward: size mismatch");
    }
    for (int c = 0; c < classes_; ++c) out[c] = 0.0;
    const double* w = weights_.data();
    for (int i = 0; i < features_; ++i, w += classes_) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      for (int c = 0; c < classes_; ++c) out[c] += xi * w[c];
    }
    for (int c = 0; c < classes_; ++c) out[c] = sigmoid(out[c]);
  }

  std::vector<double> forward(std::span<const double> x) const {
    std::vector<double> out(classes_);
    forward_into(x, out);
    return out;
  }

  // One SGD step: e = forward(x) - onehot(label); W[i][c] -= lr * x_i * e_c.
  // Fills probs with the pre-update outputs so callers can track the loss
  // without a second forward pass.
  void sgd_step(std::span<const double> x, int label, double lr,
                std::span<double> probs) {
    forward_into(x, probs);
    if (label < 0 || label >= classes_) {
      throw std::invalid_argument("sgd_step: label out of range");
    }
    double* w = weights_.data();
    for (int i = 0; i < features_; ++i, w += classes_) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const double step = lr * xi;
      for (int c = 0; c < classes_; ++c) {
        const double err = probs[c] - (c == label ? 1.0 : 0.0);
        w[c] -= step * err;
      }
    }
  }

  void sgd_step(std::span<const double> x, int label, double lr) {
    std::vector<double> probs(classes_);
    sgd_step(x, label, lr, probs);
  }

  // Flat binary artifact with a shape header, for reuse across runs.
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("readout: cannot open " + path.string());
    const char magic[4] = {'M', 'R', 'C', 'W'};
    const std::uint32_t version = 1;
    const std::uint32_t n = static_cast<std::uint32_t>(features_);
    const std::uint32_t c = static_cast<std::uint32_t>(classes_);
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&c), 4);
    out.write(reinterpret_cast<const char*>(weights_.data()),
              static_cast<std::streamsize>(weights_.size() * sizeof(double)));
    if (!out) throw std::runtime_error("readout: short write to " + path.string());
  }

  static ReadoutModel load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("readout: cannot open " + path.string());
    char magic[4];
    std::uint32_t version = 0, n = 0, c = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&c), 4);
    if (!in || std::memcmp(magic, "MRCW", 4) != 0 || version != 1) {
      throw std::runtime_error("readout: bad weight file header");
    }
    ReadoutModel m(static_cast<int>(n), static_cast<int>(c));
    in.read(reinterpret_cast<char*>(m.weights_.data()),
            static_cast<std::streamsize>(m.weights_.size() * sizeof(double)));
    if (!in) throw std::runtime_error("readout: truncated weight file");
    return m;
  }

 private:
  int features_;
  int classes_;
  std::vector<double> weights_;  // row-major [feature][class]
};

// Summed binary cross-entropy over the per-class sigmoid outputs.
inline double bce_loss(std::span<const double> probs, int label) {
  constexpr double kEps = 1e-12;
  double loss = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    const double y = std::min(1.0 - kEps, std::max(kEps, probs[c]));
    const double t = static_cast<int>(c) == label ? 1.0 : 0.0;
    loss -= t * std::log(y) + (1.0 - t) * std::log(1.0 - y);
  }
  return loss;
}

inline double mean_bce(const ReadoutModel& model, const FeatureSet& data) {
  if (data.count() == 0) throw std::invalid_argument("mean_bce: empty set");
  std::vector<double> probs(model.classes());
  double total = 0.0;
  for (std::size_t i = 0; i < data.count(); ++i) {
    model.forward_into(data.sample(i), probs);
    total += bce_loss(probs, data.labels[i]);
  }
  return total / static_cast<double>(data.count());
}

struct TrainResult {
  // Mean per-sample loss of each epoch, computed on the forward pass made
  // just before that sample's update.
  std::vector<double> epoch_loss;
};

// Per-sample SGD over the whole set for cfg.epochs epochs, with a seeded
// per-epoch shuffle when enabled.
inline TrainResult train(ReadoutModel& model, const FeatureSet& data,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (data.count() == 0) throw std::invalid_argument("train: empty dataset");
  if (data.dim != model.features()) {
    throw std::invalid_argument("train: feature dimension mismatch");
  }
  Rng rng(cfg.seed);
  std::vector<std::uint32_t> order(data.count());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> probs(model.classes());

  TrainResult result;
  result.epoch_loss.reserve(cfg.epochs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::uint32_t idx : order) {
      model.sgd_step(data.sample(idx), data.labels[idx], cfg.learning_rate,
                     probs);
      loss_sum += bce_loss(probs, data.labels[idx]);
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(data.count()));
  }
  return result;
}

// Argmax over the sigmoid outputs; ties break to the lowest class index.
inline int predict(const ReadoutModel& model, std::span<const double> x,
                   std::span<double> probs) {
  model.forward_into(x, probs);
  int best = 0;
  for (int c = 1; c < model.classes(); ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return best;
}

inline double evaluate(const ReadoutModel& model, const FeatureSet& data) {
  if (data.count() == 0) throw std::invalid_argument("evaluate: empty set");
  std::vector<double> probs(model.classes());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.count(); ++i) {
    if (predict(model, data.sample(i), probs) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.count());
}

}  // namespace memrc
