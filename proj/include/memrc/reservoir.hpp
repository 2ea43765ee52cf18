#pragma once

// A bank of volatile memristors driven in lockstep by one image's pulse
// trains, followed by a single simultaneous read pulse. Raw read currents
// are quantized and min-max rescaled into the feature vector seen by the
// readout layer.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "memrc/device.hpp"
#include "memrc/preprocess.hpp"

namespace memrc {

// Energy/time bookkeeping for one image. wall_time covers the write slots
// plus the single read slot.
struct ImageCost {
  double write_energy = 0.0;  // J
  double read_energy = 0.0;   // J
  std::size_t slot_count = 0; // write slots applied to every device
  double wall_time = 0.0;     // (slot_count + 1) * t_pulse

  double total_energy() const { return write_energy + read_energy; }

  ImageCost& operator+=(const ImageCost& other) {
    write_energy += other.write_energy;
    read_energy += other.read_energy;
    slot_count += other.slot_count;
    wall_time += other.wall_time;
    return *this;
  }
};

// Quantized, rescaled read currents; values lie on the (2^bits - 1)-step
// lattice in [0, 1].
struct FeatureVector {
  std::vector<double> values;
  int bits = 0;
};

namespace detail {

inline void check_bits(int bits) {
  if (bits < 1 || bits > 7) {
    throw std::invalid_argument("quantize: bits must be in [1, 7]");
  }
}

inline FeatureVector quantize_range(std::span<const double> currents, int bits,
                                    double lo, double hi, bool clamp) {
  check_bits(bits);
  if (currents.empty()) {
    throw std::invalid_argument("quantize: empty current vector");
  }
  FeatureVector out;
  out.bits = bits;
  out.values.resize(currents.size());
  const double levels = static_cast<double>((1 << bits) - 1);
  const double range = hi - lo;
  if (!(range > 0.0)) {
    return out;  // degenerate range: all zeros
  }
  for (std::size_t i = 0; i < currents.size(); ++i) {
    double t = (currents[i] - lo) / range;
    if (clamp) t = std::min(1.0, std::max(0.0, t));
    const double level = std::floor(t * levels + 0.5);  // half rounds up
    out.values[i] = level / levels;
  }
  return out;
}

}  // namespace detail

// Per-image auto-range: min/max of this current vector define the scale.
inline FeatureVector quantize_rescale(std::span<const double> currents,
                                      int bits) {
  detail::check_bits(bits);
  if (currents.empty()) {
    throw std::invalid_argument("quantize: empty current vector");
  }
  double lo = currents[0], hi = currents[0];
  for (double c : currents) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return detail::quantize_range(currents, bits, lo, hi, false);
}

// Fixed-range variant for globally calibrated scaling; inputs outside
// [lo, hi] are clamped.
inline FeatureVector quantize_rescale(std::span<const double> currents,
                                      int bits, double lo, double hi) {
  return detail::quantize_range(currents, bits, lo, hi, true);
}

class ReservoirBank {
 public:
  ReservoirBank(std::size_t device_count, DeviceParams params)
      : params_(params) {
    params_.validate();
    devices_.assign(device_count, DeviceState{params_.w_min});
  }

  std::size_t size() const { return devices_.size(); }
  const DeviceParams& params() const { return params_; }
  std::span<const DeviceState> devices() const { return devices_; }

  void reset() {
    for (auto& d : devices_) d.w = params_.w_min;
  }

  // Applies one train per device in lockstep: '1' slots write (and accrue
  // write energy at the state held at pulse start), '0' slots decay for
  // free. Shorter trains are padded with trailing '0' slots up to the
  // longest train.
  ImageCost ingest(std::span<const PulseTrain> trains) {
    if (trains.size() != devices_.size()) {
      throw std::invalid_argument("ingest: train count does not match device count");
    }
    std::size_t max_len = 0;
    for (const auto& t : trains) max_len = std::max(max_len, t.slots.size());

    ImageCost cost;
    cost.slot_count = max_len;
    cost.wall_time = static_cast<double>(max_len + 1) * params_.t_pulse;
    for (std::size_t i = 0; i < devices_.size(); ++i) {
      DeviceState s = devices_[i];
      const auto& slots = trains[i].slots;
      for (std::size_t j = 0; j < max_len; ++j) {
        const bool bit = j < slots.size() && slots[j] != 0;
        if (bit) {
          cost.write_energy += pulse_energy(s, params_.v_write, params_);
          s = write_update(s, params_);
        } else {
          s = decay_update(s, params_);
        }
      }
      devices_[i] = s;
    }
    return cost;
  }

  // One read pulse through every device, immediately after ingest. Reads do
  // not perturb the state. Returns the raw currents and the read-energy
  // increment (the read slot's time is already in the ingest cost).
  std::pair<std::vector<double>, ImageCost> read_all() const {
    std::vector<double> currents(devices_.size());
    ImageCost increment;
    for (std::size_t i = 0; i < devices_.size(); ++i) {
      currents[i] = read_current(devices_[i], params_.v_read, params_);
      increment.read_energy += pulse_energy(devices_[i], params_.v_read, params_);
    }
    return {std::move(currents), increment};
  }

  // reset + ingest + read in one shot; the usual per-image cycle.
  std::pair<std::vector<double>, ImageCost> process(
      std::span<const PulseTrain> trains) {
    reset();
    ImageCost cost = ingest(trains);
    auto [currents, read_cost] = read_all();
    cost += read_cost;
    return {std::move(currents), cost};
  }

 private:
  std::vector<DeviceState> devices_;
  DeviceParams params_;
};

}  // namespace memrc
