#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include "slotkit/error.hpp"
#include "slotkit/io.hpp"

namespace slotkit::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw LoadError("cannot open " + path.string());
  return f;
}

class PngReader {
 public:
  PngReader() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png_ != nullptr) info_ = png_create_info_struct(png_);
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriter {
 public:
  PngWriter() {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png_ != nullptr) info_ = png_create_info_struct(png_);
  }
  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

// Writes a single-channel image; `row_bytes` holds already-packed samples.
void write_gray(const fs::path& path, int width, int height, int bit_depth,
                const std::vector<png_byte>& packed) {
  FilePtr f = open(path, "wb");
  PngWriter w;
  if (w.png_ == nullptr || w.info_ == nullptr) throw Error("libpng: allocation failed");
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  const std::size_t stride = static_cast<std::size_t>(width) * (bit_depth / 8);
  for (int v = 0; v < height; ++v) {
    rows[static_cast<std::size_t>(v)] =
        const_cast<png_bytep>(packed.data() + static_cast<std::size_t>(v) * stride);
  }
  if (setjmp(png_jmpbuf(w.png_))) throw Error("libpng: failed writing " + path.string());
  png_init_io(w.png_, f.get());
  png_set_IHDR(w.png_, w.info_, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png_, w.info_);
  png_write_image(w.png_, rows.data());
  png_write_end(w.png_, nullptr);
}

}  // namespace

RawImage read_png(const fs::path& path) {
  if (!fs::exists(path)) throw LoadError("file not found: " + path.string());
  FilePtr f = open(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw LoadError("not a PNG file: " + path.string());
  }
  PngReader r;
  if (r.png_ == nullptr || r.info_ == nullptr) throw Error("libpng: allocation failed");

  RawImage img;
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
  // Nothing with a destructor may be created between setjmp and the last
  // libpng call below.
  if (setjmp(png_jmpbuf(r.png_))) throw LoadError("corrupt PNG: " + path.string());
  png_init_io(r.png_, f.get());
  png_set_sig_bytes(r.png_, 8);
  png_read_info(r.png_, r.info_);

  const int color = png_get_color_type(r.png_, r.info_);
  const int depth = png_get_bit_depth(r.png_, r.info_);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png_);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(r.png_);
  if (png_get_valid(r.png_, r.info_, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png_);
  png_read_update_info(r.png_, r.info_);

  img.width = static_cast<int>(png_get_image_width(r.png_, r.info_));
  img.height = static_cast<int>(png_get_image_height(r.png_, r.info_));
  img.channels = png_get_channels(r.png_, r.info_);
  img.bit_depth = png_get_bit_depth(r.png_, r.info_);
  const std::size_t stride = png_get_rowbytes(r.png_, r.info_);
  data.resize(stride * static_cast<std::size_t>(img.height));
  rows.resize(static_cast<std::size_t>(img.height));
  for (int v = 0; v < img.height; ++v) rows[static_cast<std::size_t>(v)] = data.data() + stride * v;
  png_read_image(r.png_, rows.data());
  png_read_end(r.png_, nullptr);

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.samples.resize(count);
  if (img.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      img.samples[i] = static_cast<std::uint16_t>((data[2 * i] << 8) | data[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) img.samples[i] = data[i];
  }
  return img;
}

GrayImage read_gray_png(const fs::path& path) {
  const RawImage raw = read_png(path);
  if (raw.bit_depth != 8) throw LoadError("expected an 8-bit image: " + path.string());
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  if (raw.channels <= 2) {
    std::vector<std::uint8_t> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<std::uint8_t>(raw.samples[i * raw.channels]);
    return GrayImage(raw.width, raw.height, std::move(g));
  }
  std::vector<std::uint8_t> rgb(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) rgb[3 * i + c] = static_cast<std::uint8_t>(raw.samples[i * raw.channels + c]);
  }
  return rgb_to_gray(raw.width, raw.height, rgb);
}

void write_gray_png(const fs::path& path, const GrayImage& image) {
  const auto v = image.values();
  write_gray(path, image.width(), image.height(), 8, std::vector<png_byte>(v.begin(), v.end()));
}

BinaryMask read_mask_png(const fs::path& path) {
  const RawImage raw = read_png(path);
  if (raw.bit_depth != 8 || raw.channels > 2) {
    throw LoadError("expected an 8-bit grayscale mask: " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = raw.samples[i * raw.channels] >= 128 ? 1 : 0;
  return BinaryMask(raw.width, raw.height, std::move(bits));
}

void write_mask_png(const fs::path& path, const BinaryMask& mask) {
  std::vector<png_byte> out(mask.size());
  const auto bits = mask.bits();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bits[i] ? 255 : 0;
  write_gray(path, mask.width(), mask.height(), 8, out);
}

DepthImage read_depth_png(const fs::path& path) {
  const RawImage raw = read_png(path);
  if (raw.bit_depth != 16 || raw.channels != 1) {
    throw LoadError("expected a 16-bit grayscale depth image: " + path.string());
  }
  std::vector<double> m(raw.samples.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = raw.samples[i] / 1000.0;
  return DepthImage(raw.width, raw.height, std::move(m));
}

void write_depth_png(const fs::path& path, const DepthImage& depth) {
  const auto vals = depth.values();
  std::vector<png_byte> out(2 * vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double mm = std::round(vals[i] * 1000.0);
    if (mm < 0.0 || mm > 65535.0) throw InputError("depth exceeds the 16-bit millimeter range");
    const auto s = static_cast<std::uint16_t>(mm);
    out[2 * i] = static_cast<png_byte>(s >> 8);
    out[2 * i + 1] = static_cast<png_byte>(s & 0xff);
  }
  write_gray(path, depth.width(), depth.height(), 16, out);
}

}  // namespace slotkit::io
