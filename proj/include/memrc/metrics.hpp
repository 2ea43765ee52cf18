#pragma once

// Throughput / energy-efficiency / area accounting for one configuration.
// Throughput is idealized device-limited time (pulse slots only); area is
// approximated by the reservoir device count.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "memrc/device.hpp"
#include "memrc/preprocess.hpp"

namespace memrc {

// Longest emitted row for an n x m image: originals and parity rows have m
// slots, 2D column rows have n.
inline int longest_row_length(const PreprocessSpec& spec, int rows, int cols) {
  int len = cols;
  if (spec.dimension == Dimension::kTwoD) len = std::max(len, rows);
  return len;
}

// Seconds to push one image through the reservoir: longest section plus the
// single read slot.
inline double wall_time_per_image(const PreprocessSpec& spec, int rows,
                                  int cols, const DeviceParams& params) {
  spec.validate();
  const int len = longest_row_length(spec, rows, cols);
  if (spec.sections > len) {
    throw std::invalid_argument("wall_time: sections exceed row length");
  }
  const int slots = (len + spec.sections - 1) / spec.sections;  // ceil
  return static_cast<double>(slots + 1) * params.t_pulse;
}

inline double throughput(const PreprocessSpec& spec, int rows, int cols,
                         const DeviceParams& params) {
  return 1.0 / wall_time_per_image(spec, rows, cols, params);
}

inline double energy_efficiency(double total_energy, std::size_t image_count) {
  if (!(total_energy > 0.0)) {
    throw std::invalid_argument("energy_efficiency: total energy must be > 0");
  }
  return static_cast<double>(image_count) / total_energy;
}

inline std::size_t area(const PreprocessSpec& spec, int rows, int cols) {
  return reservoir_size(spec, rows, cols);
}

// Accuracy plus cost accounting for one configuration.
struct ExperimentReport {
  PreprocessSpec spec;
  int bits = 6;
  double accuracy = 0.0;
  double images_per_second = 0.0;
  double images_per_joule = 0.0;
  std::size_t device_count = 0;
  double write_energy_fraction = 0.0;
  // provenance
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace memrc
