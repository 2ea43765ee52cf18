#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "device_fixtures.hpp"
#include "memrc/metrics.hpp"
#include "memrc/preprocess.hpp"
#include "memrc/reservoir.hpp"
#include "memrc/rng.hpp"

using namespace memrc;

namespace {

constexpr double kRelTol = 1e-9;

double rel_err(double actual, double expected) {
  return std::abs(actual - expected) / std::abs(expected);
}

std::vector<PulseTrain> single_train(std::vector<std::uint8_t> slots) {
  std::vector<PulseTrain> trains;
  trains.push_back(PulseTrain{std::move(slots)});
  return trains;
}

}  // namespace

TEST_CASE("ingest folds write and decay slots per device") {
  ReservoirBank bank(1, DeviceParams{});
  const ImageCost cost = bank.ingest(single_train({1, 0, 0}));
  CHECK(rel_err(bank.devices()[0].w, fixtures::kTrain100Final) < kRelTol);
  CHECK(cost.slot_count == 3);
  CHECK(cost.wall_time == Catch::Approx(4e-9).epsilon(1e-12));
  CHECK(rel_err(cost.write_energy, fixtures::kWriteEnergyWMin) < kRelTol);
  CHECK(cost.read_energy == 0.0);
}

TEST_CASE("all-zero trains cost nothing and stay at the floor") {
  ReservoirBank bank(1, DeviceParams{});
  const ImageCost cost = bank.ingest(single_train({0, 0, 0}));
  CHECK(bank.devices()[0].w == 0.1);
  CHECK(cost.write_energy == 0.0);
}

TEST_CASE("ingest rejects a train-count mismatch") {
  ReservoirBank bank(2, DeviceParams{});
  CHECK_THROWS_AS(bank.ingest(single_train({1})), std::invalid_argument);
}

TEST_CASE("ragged trains are padded with trailing decay slots") {
  DeviceParams p;
  std::vector<PulseTrain> trains;
  trains.push_back(PulseTrain{{1}});        // padded to [1,0,0]
  trains.push_back(PulseTrain{{1, 0, 0}});
  ReservoirBank bank(2, p);
  const ImageCost cost = bank.ingest(trains);
  CHECK(cost.slot_count == 3);
  CHECK(bank.devices()[0].w == bank.devices()[1].w);
}

TEST_CASE("read_all reports currents and read energy") {
  DeviceParams p;
  ReservoirBank bank(112, p);
  auto [currents, increment] = bank.read_all();
  REQUIRE(currents.size() == 112);
  for (double c : currents) {
    CHECK(rel_err(c, fixtures::kReadCurrentWMinVRead) < kRelTol);
  }
  CHECK(rel_err(increment.read_energy, 112.0 * fixtures::kReadEnergyWMin) < 1e-6);
  CHECK(increment.write_energy == 0.0);
}

TEST_CASE("a device at the ceiling reads the sinh-term current") {
  DeviceParams p;
  ReservoirBank bank(1, p);
  bank.ingest(single_train(std::vector<std::uint8_t>(400, 1)));  // saturate
  auto [currents, increment] = bank.read_all();
  CHECK(currents[0] < fixtures::kReadCurrentWMaxVRead * (1 + 1e-9));
  CHECK(currents[0] > fixtures::kReadCurrentWMinVRead);
}

TEST_CASE("reset floors every device and is idempotent") {
  DeviceParams p;
  ReservoirBank bank(3, p);
  bank.ingest(std::vector<PulseTrain>{PulseTrain{{1, 1}}, PulseTrain{{0, 1}},
                                      PulseTrain{{1, 0}}});
  bank.reset();
  for (const auto& d : bank.devices()) CHECK(d.w == p.w_min);
  bank.reset();
  for (const auto& d : bank.devices()) CHECK(d.w == p.w_min);
  auto [currents, _] = bank.read_all();
  for (double c : currents) CHECK(c == currents[0]);
}

TEST_CASE("process equals reset+ingest+read_all") {
  DeviceParams p;
  ReservoirBank a(1, p), b(1, p);
  auto [ca, cost_a] = a.process(single_train({1, 0, 1}));
  b.reset();
  ImageCost cost_b = b.ingest(single_train({1, 0, 1}));
  auto [cb, read_b] = b.read_all();
  cost_b += read_b;
  CHECK(ca == cb);
  CHECK(cost_a.write_energy == cost_b.write_energy);
  CHECK(cost_a.read_energy == cost_b.read_energy);
  CHECK(cost_a.wall_time == cost_b.wall_time);
}

TEST_CASE("flipping any 0 slot to 1 never lowers the final current") {
  DeviceParams p;
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = 2 + rng.below(14);
    std::vector<std::uint8_t> slots(len);
    for (auto& b : slots) b = static_cast<std::uint8_t>(rng.below(2));
    ReservoirBank bank(1, p);
    bank.ingest(single_train(slots));
    const double base_w = bank.devices()[0].w;
    const double base_i = read_current(bank.devices()[0], p.v_read, p);
    for (std::size_t i = 0; i < len; ++i) {
      if (slots[i] != 0) continue;
      auto flipped = slots;
      flipped[i] = 1;
      ReservoirBank bank2(1, p);
      bank2.ingest(single_train(flipped));
      CHECK(bank2.devices()[0].w >= base_w);
      CHECK(read_current(bank2.devices()[0], p.v_read, p) >= base_i);
    }
  }
}

TEST_CASE("ingested wall time matches the analytic per-image time") {
  DeviceParams p;
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int side = static_cast<int>(4 + rng.below(25));
    BinaryImage img{side, side, {}};
    img.bits.resize(static_cast<std::size_t>(side) * side);
    for (auto& b : img.bits) b = static_cast<std::uint8_t>(rng.below(2));
    const PreprocessSpec spec{
        rng.below(2) ? Dimension::kTwoD : Dimension::kOneD,
        rng.below(2) == 1, static_cast<int>(1 + rng.below(side)), 25};
    ReservoirBank bank(reservoir_size(spec, side, side), p);
    const ImageCost cost = bank.ingest(make_pulse_trains(img, spec));
    CHECK(cost.wall_time ==
          Catch::Approx(wall_time_per_image(spec, side, side, p)).epsilon(1e-12));
  }
}

TEST_CASE("quantize_rescale maps to the documented lattice") {
  const std::vector<double> currents{1e-6, 3e-6, 5e-6};
  const FeatureVector fv = quantize_rescale(currents, 6);
  REQUIRE(fv.values.size() == 3);
  CHECK(fv.values[0] == 0.0);
  CHECK(fv.values[1] == Catch::Approx(32.0 / 63.0).epsilon(1e-12));  // 31.5 rounds up
  CHECK(fv.values[2] == 1.0);
}

TEST_CASE("degenerate current range quantizes to all zeros") {
  const std::vector<double> currents{2e-6, 2e-6, 2e-6};
  const FeatureVector fv = quantize_rescale(currents, 6);
  for (double v : fv.values) CHECK(v == 0.0);
}

TEST_CASE("1-bit quantization hits the binary extremes") {
  const std::vector<double> currents{1e-6, 5e-6};
  const FeatureVector fv = quantize_rescale(currents, 1);
  CHECK(fv.values == std::vector<double>{0.0, 1.0});
}

TEST_CASE("quantize_rescale validates its inputs") {
  const std::vector<double> currents{1e-6};
  CHECK_THROWS_AS(quantize_rescale(currents, 0), std::invalid_argument);
  CHECK_THROWS_AS(quantize_rescale(currents, 8), std::invalid_argument);
  CHECK_THROWS_AS(quantize_rescale(std::vector<double>{}, 6),
                  std::invalid_argument);
}

TEST_CASE("all feature values lie on the (2^bits - 1)-step lattice") {
  Rng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const int bits = static_cast<int>(1 + rng.below(7));
    std::vector<double> currents(1 + rng.below(64));
    for (auto& c : currents) c = rng.uniform(1e-6, 6e-5);
    const FeatureVector fv = quantize_rescale(currents, bits);
    const double levels = static_cast<double>((1 << bits) - 1);
    for (double v : fv.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      const double scaled = v * levels;
      CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
    }
  }
}

TEST_CASE("fixed-range quantization clamps out-of-range currents") {
  const std::vector<double> currents{0.5e-6, 2e-6, 9e-6};
  const FeatureVector fv = quantize_rescale(currents, 3, 1e-6, 5e-6);
  CHECK(fv.values.front() == 0.0);
  CHECK(fv.values.back() == 1.0);
}
