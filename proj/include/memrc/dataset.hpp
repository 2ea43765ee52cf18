#pragma once

// IDX (MNIST container) loading with transparent gzip support, plus seeded
// subsetting. Big-endian headers: magic 2051 for image files, 2049 for
// label files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "memrc/preprocess.hpp"
#include "memrc/rng.hpp"

namespace memrc {

enum class IdxErrc { io, bad_magic, truncated, count_mismatch };

class DatasetError : public std::runtime_error {
 public:
  DatasetError(IdxErrc kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  IdxErrc kind() const noexcept { return kind_; }

 private:
  IdxErrc kind_;
};

struct LabeledImageSet {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<std::uint8_t>> images;  // each rows*cols, row-major
  std::vector<std::uint8_t> labels;

  std::size_t count() const { return images.size(); }

  GrayImage gray(std::size_t i) const { return {rows, cols, images[i]}; }
};

namespace detail {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

inline std::uint32_t read_be32(std::span<const std::uint8_t> bytes,
                               std::size_t offset) {
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

inline void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

// Reads a whole file; paths ending in ".gz" are decompressed.
inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  if (path.extension() == ".gz") {
    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (!gz) {
      throw DatasetError(IdxErrc::io, "cannot open " + path.string());
    }
    std::vector<std::uint8_t> data;
    std::uint8_t chunk[1 << 16];
    int n = 0;
    while ((n = gzread(gz, chunk, sizeof(chunk))) > 0) {
      data.insert(data.end(), chunk, chunk + n);
    }
    const bool ok = n == 0;
    gzclose(gz);
    if (!ok) {
      throw DatasetError(IdxErrc::io, "gzip read error in " + path.string());
    }
    return data;
  }
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DatasetError(IdxErrc::io, "cannot open " + path.string());
  const auto size = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (!in) throw DatasetError(IdxErrc::io, "read error in " + path.string());
  return data;
}

struct IdxImages {
  std::uint32_t count = 0, rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
};

inline IdxImages parse_idx_images(std::span<const std::uint8_t> bytes,
                                  const std::string& name) {
  if (bytes.size() < 4) {
    throw DatasetError(IdxErrc::truncated, name + ": image header truncated");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kImageMagic) {
    throw DatasetError(IdxErrc::bad_magic,
                       name + ": expected image magic 2051, got " +
                           std::to_string(magic));
  }
  if (bytes.size() < 16) {
    throw DatasetError(IdxErrc::truncated, name + ": image header truncated");
  }
  IdxImages idx;
  idx.count = read_be32(bytes, 4);
  idx.rows = read_be32(bytes, 8);
  idx.cols = read_be32(bytes, 12);
  const std::size_t expected =
      16 + static_cast<std::size_t>(idx.count) * idx.rows * idx.cols;
  if (bytes.size() != expected) {
    throw DatasetError(IdxErrc::truncated,
                       name + ": image payload size mismatch (expected " +
                           std::to_string(expected) + " bytes, got " +
                           std::to_string(bytes.size()) + ")");
  }
  idx.pixels.assign(bytes.begin() + 16, bytes.end());
  return idx;
}

inline std::vector<std::uint8_t> parse_idx_labels(
    std::span<const std::uint8_t> bytes, const std::string& name) {
  if (bytes.size() < 4) {
    throw DatasetError(IdxErrc::truncated, name + ": label header truncated");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kLabelMagic) {
    throw DatasetError(IdxErrc::bad_magic,
                       name + ": expected label magic 2049, got " +
                           std::to_string(magic));
  }
  if (bytes.size() < 8) {
    throw DatasetError(IdxErrc::truncated, name + ": label header truncated");
  }
  const std::uint32_t count = read_be32(bytes, 4);
  if (bytes.size() != 8 + static_cast<std::size_t>(count)) {
    throw DatasetError(IdxErrc::truncated,
                       name + ": label payload size mismatch");
  }
  return {bytes.begin() + 8, bytes.end()};
}

}  // namespace detail

inline LabeledImageSet load_idx(const std::filesystem::path& images_path,
                                const std::filesystem::path& labels_path) {
  const auto image_bytes = detail::read_bytes(images_path);
  const auto label_bytes = detail::read_bytes(labels_path);
  auto idx = detail::parse_idx_images(image_bytes, images_path.filename().string());
  auto labels = detail::parse_idx_labels(label_bytes, labels_path.filename().string());
  if (labels.size() != idx.count) {
    throw DatasetError(IdxErrc::count_mismatch,
                       "image count " + std::to_string(idx.count) +
                           " != label count " + std::to_string(labels.size()));
  }
  LabeledImageSet set;
  set.rows = static_cast<int>(idx.rows);
  set.cols = static_cast<int>(idx.cols);
  set.labels = std::move(labels);
  set.images.reserve(idx.count);
  const std::size_t stride = static_cast<std::size_t>(idx.rows) * idx.cols;
  for (std::uint32_t i = 0; i < idx.count; ++i) {
    const auto* begin = idx.pixels.data() + static_cast<std::size_t>(i) * stride;
    set.images.emplace_back(begin, begin + stride);
  }
  return set;
}

// Seeded uniform sample without replacement; count == set.count() yields a
// permutation-free copy of the content (selection order is still seeded).
inline LabeledImageSet subset(const LabeledImageSet& set, std::size_t count,
                              std::uint64_t seed) {
  if (count > set.count()) {
    throw std::invalid_argument("subset: count exceeds dataset size");
  }
  std::vector<std::uint32_t> indices(set.count());
  std::iota(indices.begin(), indices.end(), 0u);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  LabeledImageSet out;
  out.rows = set.rows;
  out.cols = set.cols;
  out.images.reserve(count);
  out.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.images.push_back(set.images[indices[i]]);
    out.labels.push_back(set.labels[indices[i]]);
  }
  return out;
}

inline std::vector<std::size_t> label_histogram(const LabeledImageSet& set) {
  std::size_t max_label = 0;
  for (auto l : set.labels) max_label = std::max<std::size_t>(max_label, l);
  std::vector<std::size_t> hist(max_label + 1, 0);
  for (auto l : set.labels) ++hist[l];
  return hist;
}

// Byte-exact IDX re-serialization (round-trip check and export tooling).
inline std::vector<std::uint8_t> serialize_idx_images(
    const LabeledImageSet& set) {
  std::vector<std::uint8_t> out;
  const std::size_t stride = static_cast<std::size_t>(set.rows) * set.cols;
  out.reserve(16 + set.count() * stride);
  detail::write_be32(out, detail::kImageMagic);
  detail::write_be32(out, static_cast<std::uint32_t>(set.count()));
  detail::write_be32(out, static_cast<std::uint32_t>(set.rows));
  detail::write_be32(out, static_cast<std::uint32_t>(set.cols));
  for (const auto& img : set.images) {
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

inline std::vector<std::uint8_t> serialize_idx_labels(
    const LabeledImageSet& set) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + set.labels.size());
  detail::write_be32(out, detail::kLabelMagic);
  detail::write_be32(out, static_cast<std::uint32_t>(set.labels.size()));
  out.insert(out.end(), set.labels.begin(), set.labels.end());
  return out;
}

}  // namespace memrc
