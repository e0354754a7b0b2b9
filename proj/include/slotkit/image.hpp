#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace slotkit {

/// Row-major boolean raster. Bits are stored one byte per pixel (0 or 1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }
  bool empty_raster() const { return bits_.empty(); }

  bool at(int u, int v) const { return bits_[index(u, v)] != 0; }
  void set(int u, int v, bool value = true) { bits_[index(u, v)] = value ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }

  std::size_t area() const;
  bool same_shape(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> mutable_bits() { return bits_; }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// 8-bit grayscale raster.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint8_t at(int u, int v) const { return values_[index(u, v)]; }
  void set(int u, int v, std::uint8_t value) { values_[index(u, v)] = value; }
  std::span<const std::uint8_t> values() const { return values_; }
  std::span<std::uint8_t> mutable_values() { return values_; }

  bool same_shape(const GrayImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> values_;
};

/// ITU-R BT.601 luma of interleaved RGB, rounded to nearest.
GrayImage rgb_to_gray(int width, int height, std::span<const std::uint8_t> rgb);

}  // namespace slotkit
