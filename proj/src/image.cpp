#include "slotkit/image.hpp"

#include <cmath>
#include <numeric>

#include "slotkit/error.hpp"

namespace slotkit {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw InputError("raster dimensions must be positive, got " + std::to_string(width) +
                     "x" + std::to_string(height));
  }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height);
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InputError("mask bit count does not match its dimensions");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t BinaryMask::area() const {
  return static_cast<std::size_t>(std::accumulate(bits_.begin(), bits_.end(), std::size_t{0}));
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> values)
    : width_(width), height_(height), values_(std::move(values)) {
  check_dims(width, height);
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InputError("gray image value count does not match its dimensions");
  }
}

GrayImage rgb_to_gray(int width, int height, std::span<const std::uint8_t> rgb) {
  check_dims(width, height);
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (rgb.size() != 3 * n) throw InputError("RGB buffer size does not match dimensions");
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double luma = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(std::lround(luma));
  }
  return GrayImage(width, height, std::move(out));
}

}  // namespace slotkit
