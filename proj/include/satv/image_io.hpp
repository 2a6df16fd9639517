// 8-bit grayscale image files: binary PGM (P5) and PNG.
#ifndef SATV_IMAGE_IO_HPP_
#define SATV_IMAGE_IO_HPP_

#include <stdexcept>
#include <string>

#include "satv/grid.hpp"

namespace satv {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a P5 or PNG file (detected from its leading bytes). PNG color input
/// is converted to gray. Values stay on the 0-255 scale.
ImageGrid<double> load_image(const std::string& path, double h = 5);

/// Writes values clamped to [0, 255] and rounded to the nearest integer.
/// A ".png" extension selects PNG, anything else P5.
void save_image(const ImageGrid<double>& u, const std::string& path);

/// A pixel is missing when its gray value is >= 128.
Mask load_mask(const std::string& path);
/// Missing pixels are written as 255, known pixels as 0.
void save_mask(const Mask& m, const std::string& path);

/// Round-to-nearest and clamp to [0, 255], as done on file output.
Array2<double> quantize(const Array2<double>& v);

}  // namespace satv

#endif  // SATV_IMAGE_IO_HPP_
