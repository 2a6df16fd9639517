#include "satv/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

namespace satv {

namespace {

using Bytes = std::vector<std::uint8_t>;

struct Raster {
  Index rows = 0, cols = 0;
  Bytes pixels;  // row-major
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool is_png(const Bytes& b) {
  return b.size() >= 8 && png_sig_cmp(b.data(), 0, 8) == 0;
}

bool ends_with_png(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

Raster decode_pgm(const Bytes& b, const std::string& path) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    for (;;) {
      while (pos < b.size() && std::isspace(b[pos])) ++pos;
      if (pos < b.size() && b[pos] == '#') {
        while (pos < b.size() && b[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= b.size() || !std::isdigit(b[pos]))
      throw IoError(path + ": malformed PGM header");
    long v = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
      v = v * 10 + (b[pos++] - '0');
      if (v > (1L << 24)) throw IoError(path + ": PGM header value too large");
    }
    return v;
  };
  Raster r;
  r.cols = next_token();
  r.rows = next_token();
  const long maxval = next_token();
  if (r.rows <= 0 || r.cols <= 0) throw IoError(path + ": empty PGM");
  if (maxval != 255) throw IoError(path + ": only 8-bit PGM (maxval 255) is supported");
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(r.rows * r.cols);
  if (b.size() < pos + n) throw IoError(path + ": truncated PGM data");
  r.pixels.assign(b.begin() + pos, b.begin() + pos + n);
  return r;
}

Raster decode_png(const Bytes& b, const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, b.data(), b.size()))
    throw IoError(path + ": " + img.message);
  img.format = PNG_FORMAT_GRAY;
  Raster r;
  r.rows = img.height;
  r.cols = img.width;
  r.pixels.resize(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, r.pixels.data(), 0, nullptr)) {
    png_image_free(&img);
    throw IoError(path + ": " + img.message);
  }
  return r;
}

Raster read_raster(const std::string& path) {
  const Bytes b = read_file(path);
  if (is_png(b)) return decode_png(b, path);
  if (b.size() >= 2 && b[0] == 'P' && b[1] == '5') return decode_pgm(b, path);
  throw IoError(path + ": not a binary PGM or PNG file");
}

void write_raster(const Raster& r, const std::string& path) {
  if (ends_with_png(path)) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(r.cols);
    img.height = static_cast<png_uint_32>(r.rows);
    img.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.c_str(), 0, r.pixels.data(), 0, nullptr))
      throw IoError(path + ": " + img.message);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << r.cols << ' ' << r.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.pixels.data()),
            static_cast<std::streamsize>(r.pixels.size()));
  if (!out) throw IoError("write failed for " + path);
}

Raster to_raster(const Array2<double>& q) {
  Raster r;
  r.rows = q.rows();
  r.cols = q.cols();
  r.pixels.resize(static_cast<std::size_t>(q.size()));
  for (Index i = 0; i < r.rows; ++i)
    for (Index j = 0; j < r.cols; ++j)
      r.pixels[static_cast<std::size_t>(i * r.cols + j)] = static_cast<std::uint8_t>(q(i, j));
  return r;
}

}  // namespace

Array2<double> quantize(const Array2<double>& v) {
  return v.round().max(0.0).min(255.0);
}

ImageGrid<double> load_image(const std::string& path, double h) {
  const Raster r = read_raster(path);
  if (r.rows < 2 || r.cols < 2) throw IoError(path + ": image must be at least 2x2");
  Array2<double> v(r.rows, r.cols);
  for (Index i = 0; i < r.rows; ++i)
    for (Index j = 0; j < r.cols; ++j)
      v(i, j) = r.pixels[static_cast<std::size_t>(i * r.cols + j)];
  return ImageGrid<double>(std::move(v), h);
}

void save_image(const ImageGrid<double>& u, const std::string& path) {
  write_raster(to_raster(quantize(u.values)), path);
}

Mask load_mask(const std::string& path) {
  const ImageGrid<double> g = load_image(path);
  return g.values >= 128.0;
}

void save_mask(const Mask& m, const std::string& path) {
  write_raster(to_raster(m.select(Array2<double>::Constant(m.rows(), m.cols(), 255.0),
                                  Array2<double>::Zero(m.rows(), m.cols()))),
               path);
}

}  // namespace satv
