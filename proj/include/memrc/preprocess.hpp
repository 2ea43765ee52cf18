#pragma once

// Image-to-pulse-train preprocessing: binarization, optional transposed
// column rows (2D), optional XOR parity rows, and row sectioning. Every
// emitted row becomes k pulse trains; the total train count fixes the
// reservoir size.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace memrc {

struct GrayImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major, values 0..255

  std::uint8_t at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * cols + c];
  }
};

struct BinaryImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;  // row-major, values 0/1

  std::uint8_t at(int r, int c) const {
    return bits[static_cast<std::size_t>(r) * cols + c];
  }
  std::span<const std::uint8_t> row(int r) const {
    return {bits.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
};

enum class Dimension { kOneD, kTwoD };

struct PreprocessSpec {
  Dimension dimension = Dimension::kOneD;
  bool parity = false;
  int sections = 1;
  int threshold = 25;  // grayscale binarization level, strict '>'

  void validate() const {
    if (sections < 1) throw std::invalid_argument("preprocess: sections must be >= 1");
    if (threshold < 0 || threshold > 255) {
      throw std::invalid_argument("preprocess: threshold must be in [0, 255]");
    }
  }

  std::string method_name() const {
    std::string name = dimension == Dimension::kOneD ? "1d" : "2d";
    if (parity) name += "+parity";
    return name;
  }
};

// One binary write-slot sequence destined for one reservoir device.
struct PulseTrain {
  std::vector<std::uint8_t> slots;
};

inline BinaryImage binarize(const GrayImage& image, int threshold) {
  if (image.rows < 1 || image.cols < 1 ||
      image.pixels.size() !=
          static_cast<std::size_t>(image.rows) * image.cols) {
    throw std::invalid_argument("binarize: empty or inconsistent image");
  }
  BinaryImage out{image.rows, image.cols, {}};
  out.bits.resize(image.pixels.size());
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    out.bits[i] = image.pixels[i] > threshold ? 1 : 0;
  }
  return out;
}

// XOR of adjacent rows: output row i = row i ^ row i+1, giving n-1 rows.
inline BinaryImage parity_rows(const BinaryImage& image) {
  if (image.rows < 2) {
    throw std::invalid_argument("parity_rows: need at least 2 rows");
  }
  BinaryImage out{image.rows - 1, image.cols, {}};
  out.bits.resize(static_cast<std::size_t>(out.rows) * out.cols);
  for (int r = 0; r + 1 < image.rows; ++r) {
    for (int c = 0; c < image.cols; ++c) {
      out.bits[static_cast<std::size_t>(r) * out.cols + c] =
          image.at(r, c) ^ image.at(r + 1, c);
    }
  }
  return out;
}

// Emits the ordered binary rows for a spec: originals, then column rows
// (2D only, column j read top-to-bottom), then parity rows.
inline std::vector<std::vector<std::uint8_t>> expand(
    const BinaryImage& image, const PreprocessSpec& spec) {
  spec.validate();
  std::vector<std::vector<std::uint8_t>> rows;
  const bool two_d = spec.dimension == Dimension::kTwoD;
  rows.reserve(static_cast<std::size_t>(image.rows) +
               (two_d ? image.cols : 0) + (spec.parity ? image.rows - 1 : 0));
  for (int r = 0; r < image.rows; ++r) {
    auto row = image.row(r);
    rows.emplace_back(row.begin(), row.end());
  }
  if (two_d) {
    for (int c = 0; c < image.cols; ++c) {
      std::vector<std::uint8_t> col(image.rows);
      for (int r = 0; r < image.rows; ++r) col[r] = image.at(r, c);
      rows.push_back(std::move(col));
    }
  }
  if (spec.parity) {
    BinaryImage par = parity_rows(image);
    for (int r = 0; r < par.rows; ++r) {
      auto row = par.row(r);
      rows.emplace_back(row.begin(), row.end());
    }
  }
  return rows;
}

// Contiguous near-equal partition of a row into k trains. The first
// (L mod k) sections get the extra slot; concatenating the sections
// reproduces the row.
inline std::vector<PulseTrain> sectionize(std::span<const std::uint8_t> row,
                                          int k) {
  const std::size_t len = row.size();
  if (k < 1 || static_cast<std::size_t>(k) > len) {
    throw std::invalid_argument("sectionize: need 1 <= k <= row length");
  }
  std::vector<PulseTrain> trains;
  trains.reserve(k);
  const std::size_t base = len / k;
  const std::size_t extra = len % k;
  std::size_t pos = 0;
  for (int s = 0; s < k; ++s) {
    const std::size_t n = base + (static_cast<std::size_t>(s) < extra ? 1 : 0);
    trains.push_back(
        PulseTrain{{row.begin() + pos, row.begin() + pos + n}});
    pos += n;
  }
  return trains;
}

inline std::vector<PulseTrain> make_pulse_trains(const BinaryImage& image,
                                                 const PreprocessSpec& spec) {
  std::vector<PulseTrain> trains;
  for (const auto& row : expand(image, spec)) {
    auto sections = sectionize(row, spec.sections);
    for (auto& t : sections) trains.push_back(std::move(t));
  }
  return trains;
}

// Device count for an n x m image: (rows + columns-if-2D + parity-rows) * k.
inline std::size_t reservoir_size(const PreprocessSpec& spec, int rows,
                                  int cols) {
  spec.validate();
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("reservoir_size: empty image shape");
  }
  std::size_t base = static_cast<std::size_t>(rows);
  if (spec.dimension == Dimension::kTwoD) base += cols;
  if (spec.parity) base += rows - 1;
  return base * static_cast<std::size_t>(spec.sections);
}

}  // namespace memrc
