#pragma once

// Closed-form model of a metal-oxide volatile memristor.
//
// The device carries a dimensionless internal state w in [w_min, w_max].
// A write pulse ('1' slot) grows w through a window-limited update; an idle
// slot ('0') lets w relax toward the floor. The read current is a nonlinear
// function of w and the applied voltage. All updates are per-slot closed
// forms; there is no ODE integration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace memrc {

// Fitting parameters plus the drive voltages and pulse width used by the
// reservoir. Defaults are the fitted values used for all experiments.
struct DeviceParams {
  double alpha = 1e-8;    // diode-term current scale (A)
  double beta = 0.5;      // diode-term voltage slope (1/V)
  double gamma = 1e-5;    // sinh-term current scale (A)
  double delta = 4.0;     // sinh-term voltage slope (1/V)
  double lambda = 1e3;    // state growth rate (1/s)
  double eta = 8.0;       // state growth voltage slope (1/V)
  double tau = 5e-9;      // decay time constant (s)
  double w_min = 0.1;     // state floor
  double w_max = 1.0;     // state ceiling
  double v_write = 1.5;   // write pulse voltage (V)
  double v_read = 0.6;    // read pulse voltage (V)
  double t_pulse = 1e-9;  // pulse width (s)

  void validate() const {
    const double positives[] = {alpha, beta,    gamma,  delta,  lambda,
                                eta,   tau,     w_min,  w_max,  v_write,
                                v_read, t_pulse};
    for (double v : positives) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("device: all parameters must be finite and > 0");
      }
    }
    if (!(w_min < w_max)) {
      throw std::invalid_argument("device: w_min must be < w_max");
    }
  }
};

struct DeviceState {
  double w = 0.1;
};

// Window function limiting state growth; 1 near the floor, exactly 0 at the
// ceiling.
inline double window(double w, const DeviceParams& p) {
  return 1.0 - std::exp(3.0 * w) / std::exp(3.0 * p.w_max);
}

// One write pulse. Monotone non-decreasing in w, clamped to w_max.
inline DeviceState write_update(DeviceState s, const DeviceParams& p) {
  const double dw =
      window(s.w, p) * p.t_pulse * p.lambda * std::sinh(p.eta * p.v_write);
  return {std::min(p.w_max, s.w + dw)};
}

// One idle slot. Relaxes toward w_min, clamped there.
inline DeviceState decay_update(DeviceState s, const DeviceParams& p) {
  const double dw = (s.w - p.w_min) * (1.0 - std::exp(-p.t_pulse / p.tau));
  return {std::max(p.w_min, s.w - dw)};
}

inline DeviceState apply_slot(DeviceState s, bool write_pulse,
                              const DeviceParams& p) {
  return write_pulse ? write_update(s, p) : decay_update(s, p);
}

// I(w, V): diode-like term weighted by (1-w) plus a sinh term weighted by w.
// Strictly increasing in w for positive voltage; zero at V = 0.
inline double read_current(DeviceState s, double voltage,
                           const DeviceParams& p) {
  return (1.0 - s.w) * p.alpha * (1.0 - std::exp(-p.beta * voltage)) +
         s.w * p.gamma * std::sinh(p.delta * voltage);
}

// Energy of one pulse of width t_pulse, using the current at the state held
// at pulse start. Zero-voltage slots cost nothing.
inline double pulse_energy(DeviceState s, double voltage,
                           const DeviceParams& p) {
  return voltage * read_current(s, voltage, p) * p.t_pulse;
}

// Per-slot trajectory of a single device driven by a binary train, starting
// from the floor. Used by the inspect-device CLI and trajectory tests.
struct SlotTrace {
  std::size_t index;
  std::uint8_t bit;
  double w_before;
  double w_after;
  double energy;  // write energy of this slot (0 for idle slots)
};

inline std::vector<SlotTrace> trace_train(std::span<const std::uint8_t> slots,
                                          const DeviceParams& p) {
  std::vector<SlotTrace> trace;
  trace.reserve(slots.size());
  DeviceState s{p.w_min};
  for (std::size_t i = 0; i < slots.size(); ++i) {
    SlotTrace row{i, slots[i], s.w, 0.0, 0.0};
    if (slots[i]) {
      row.energy = pulse_energy(s, p.v_write, p);
      s = write_update(s, p);
    } else {
      s = decay_update(s, p);
    }
    row.w_after = s.w;
    trace.push_back(row);
  }
  return trace;
}

}  // namespace memrc
