#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <vector>

#include "memrc/preprocess.hpp"
#include "memrc/rng.hpp"

using namespace memrc;

namespace {

GrayImage make_gray(int rows, int cols, std::vector<std::uint8_t> pixels) {
  return {rows, cols, std::move(pixels)};
}

BinaryImage make_binary(int rows, int cols, std::vector<std::uint8_t> bits) {
  return {rows, cols, std::move(bits)};
}

BinaryImage random_binary(int rows, int cols, Rng& rng) {
  BinaryImage img{rows, cols, {}};
  img.bits.resize(static_cast<std::size_t>(rows) * cols);
  for (auto& b : img.bits) b = static_cast<std::uint8_t>(rng.below(2));
  return img;
}

std::size_t popcount(const std::vector<std::uint8_t>& bits) {
  return std::accumulate(bits.begin(), bits.end(), std::size_t{0});
}

}  // namespace

TEST_CASE("binarize uses a strict threshold") {
  const GrayImage img = make_gray(1, 3, {26, 25, 0});
  const BinaryImage out = binarize(img, 25);
  CHECK(out.bits == std::vector<std::uint8_t>{1, 0, 0});
}

TEST_CASE("binarize rejects empty images") {
  CHECK_THROWS_AS(binarize(GrayImage{0, 0, {}}, 25), std::invalid_argument);
  CHECK_THROWS_AS(binarize(GrayImage{2, 2, {1, 2, 3}}, 25),
                  std::invalid_argument);
}

TEST_CASE("parity rows are the XOR of adjacent rows") {
  const BinaryImage img = make_binary(2, 4, {1, 0, 1, 1, 0, 0, 1, 0});
  const BinaryImage par = parity_rows(img);
  REQUIRE(par.rows == 1);
  CHECK(par.bits == std::vector<std::uint8_t>{1, 0, 0, 1});
}

TEST_CASE("identical adjacent rows give all-zero parity rows") {
  const BinaryImage img = make_binary(3, 3, {1, 0, 1, 1, 0, 1, 1, 0, 1});
  const BinaryImage par = parity_rows(img);
  CHECK(par.rows == 2);
  CHECK(popcount(par.bits) == 0);
}

TEST_CASE("parity needs at least two rows") {
  CHECK_THROWS_AS(parity_rows(make_binary(1, 4, {1, 0, 1, 1})),
                  std::invalid_argument);
}

TEST_CASE("a 28-row image yields 27 parity rows") {
  Rng rng(3);
  const BinaryImage img = random_binary(28, 28, rng);
  CHECK(parity_rows(img).rows == 27);
}

TEST_CASE("expand emits originals, then columns, then parity rows") {
  // 2x3 image [[a,b,c],[d,e,f]] with distinct bits to track positions.
  const BinaryImage img = make_binary(2, 3, {1, 0, 0, 0, 1, 1});
  const PreprocessSpec spec{Dimension::kTwoD, false, 1, 25};
  const auto rows = expand(img, spec);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(rows[1] == std::vector<std::uint8_t>{0, 1, 1});
  CHECK(rows[2] == std::vector<std::uint8_t>{1, 0});  // column 0 top-to-bottom
  CHECK(rows[3] == std::vector<std::uint8_t>{0, 1});
  CHECK(rows[4] == std::vector<std::uint8_t>{0, 1});

  const PreprocessSpec with_parity{Dimension::kTwoD, true, 1, 25};
  const auto rows_p = expand(img, with_parity);
  REQUIRE(rows_p.size() == 6);
  CHECK(rows_p[5] == std::vector<std::uint8_t>{1, 1, 1});  // r0 ^ r1 last
}

TEST_CASE("1D expansion is just the original rows") {
  Rng rng(5);
  const BinaryImage img = random_binary(28, 28, rng);
  const auto rows = expand(img, PreprocessSpec{Dimension::kOneD, false, 1, 25});
  REQUIRE(rows.size() == 28);
  for (int r = 0; r < 28; ++r) {
    CHECK(std::equal(rows[r].begin(), rows[r].end(), img.row(r).begin()));
  }
}

TEST_CASE("sectionize splits 28 slots into four trains of seven") {
  std::vector<std::uint8_t> row(28);
  std::iota(row.begin(), row.end(), 0);  // distinct values track positions
  const auto trains = sectionize(row, 4);
  REQUIRE(trains.size() == 4);
  for (const auto& t : trains) CHECK(t.slots.size() == 7);
  CHECK(trains[0].slots.front() == 0);
  CHECK(trains[3].slots.back() == 27);
}

TEST_CASE("sectionize puts longer sections first when uneven") {
  std::vector<std::uint8_t> row(28, 1);
  const auto trains = sectionize(row, 6);
  REQUIRE(trains.size() == 6);
  const std::vector<std::size_t> expected{5, 5, 5, 5, 4, 4};
  for (std::size_t i = 0; i < trains.size(); ++i) {
    CHECK(trains[i].slots.size() == expected[i]);
  }
}

TEST_CASE("sectionize with k=1 is the identity") {
  std::vector<std::uint8_t> row{1, 0, 1, 1, 0};
  const auto trains = sectionize(row, 1);
  REQUIRE(trains.size() == 1);
  CHECK(trains[0].slots == row);
}

TEST_CASE("sectionize rejects k outside [1, L]") {
  std::vector<std::uint8_t> row(5, 0);
  CHECK_THROWS_AS(sectionize(row, 6), std::invalid_argument);
  CHECK_THROWS_AS(sectionize(row, 0), std::invalid_argument);
}

TEST_CASE("sectioning is lossless for random rows") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = 1 + rng.below(64);
    std::vector<std::uint8_t> row(len);
    for (auto& b : row) b = static_cast<std::uint8_t>(rng.below(2));
    const int k = static_cast<int>(1 + rng.below(len));
    std::vector<std::uint8_t> rebuilt;
    for (const auto& t : sectionize(row, k)) {
      rebuilt.insert(rebuilt.end(), t.slots.begin(), t.slots.end());
    }
    CHECK(rebuilt == row);
  }
}

TEST_CASE("reservoir_size reproduces the worked device counts") {
  const int n = 28, m = 28;
  CHECK(reservoir_size({Dimension::kOneD, false, 1, 25}, n, m) == 28);
  CHECK(reservoir_size({Dimension::kTwoD, false, 1, 25}, n, m) == 56);
  CHECK(reservoir_size({Dimension::kOneD, false, 4, 25}, n, m) == 112);
  CHECK(reservoir_size({Dimension::kTwoD, false, 6, 25}, n, m) == 336);
  CHECK(reservoir_size({Dimension::kOneD, true, 4, 25}, n, m) == 220);
  CHECK(reservoir_size({Dimension::kTwoD, true, 6, 25}, n, m) == 498);
  CHECK(reservoir_size({Dimension::kTwoD, true, 4, 25}, n, m) == 332);
}

TEST_CASE("pulse train count equals reservoir_size for every spec") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = static_cast<int>(2 + rng.below(20));
    const int cols = static_cast<int>(2 + rng.below(20));
    const BinaryImage img = random_binary(rows, cols, rng);
    const int max_k = std::min(rows, cols);
    const PreprocessSpec spec{
        rng.below(2) ? Dimension::kTwoD : Dimension::kOneD,
        rng.below(2) == 1, static_cast<int>(1 + rng.below(max_k)), 25};
    const auto trains = make_pulse_trains(img, spec);
    CHECK(trains.size() == reservoir_size(spec, rows, cols));
  }
}

TEST_CASE("parity rows are no denser than the pairwise unions") {
  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = static_cast<int>(2 + rng.below(12));
    const int cols = static_cast<int>(1 + rng.below(12));
    const BinaryImage img = random_binary(rows, cols, rng);
    const BinaryImage par = parity_rows(img);
    std::size_t union_count = 0;
    for (int r = 0; r + 1 < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        union_count += img.at(r, c) | img.at(r + 1, c);
      }
    }
    CHECK(popcount(par.bits) <= union_count);
  }
}

TEST_CASE("method names are stable") {
  CHECK(PreprocessSpec{Dimension::kOneD, false, 1, 25}.method_name() == "1d");
  CHECK(PreprocessSpec{Dimension::kTwoD, true, 4, 25}.method_name() == "2d+parity");
}
