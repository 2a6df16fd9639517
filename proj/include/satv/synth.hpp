// Synthetic scenes, seeded Gaussian noise and random inpainting masks.
//
// Noise and masks draw from std::mt19937_64 (whose output sequence is fixed
// by the standard) and visit pixels in column-major storage order, so a seed
// reproduces the same field bit for bit on any conforming platform.
#ifndef SATV_SYNTH_HPP_
#define SATV_SYNTH_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

#include "satv/grid.hpp"

namespace satv {

struct NoiseSpec {
  double sigma = 0;
  double mean = 0;
  std::uint64_t seed = 0;
};

/// Pixel-center convention: pixel (i,j) sits at (i + 0.5, j + 0.5) and the
/// disk is centered at (M/2, N/2).
struct DiskGeometry {
  double center_row = 0;
  double center_col = 0;
  double radius = 0;  // pixels

  static DiskGeometry centered(Index rows, Index cols, double radius) {
    return {rows / 2.0, cols / 2.0, radius};
  }
  double distance(Index i, Index j) const {
    const double di = i + 0.5 - center_row, dj = j + 0.5 - center_col;
    return std::sqrt(di * di + dj * dj);
  }
};

template <typename Scalar = double>
ImageGrid<Scalar> disk_image(Index rows, Index cols, double radius, Scalar contrast,
                             Scalar mesh = Scalar(5)) {
  if (!(radius > 0)) throw std::invalid_argument("disk radius must be positive");
  const DiskGeometry g = DiskGeometry::centered(rows, cols, radius);
  ImageGrid<Scalar> u = ImageGrid<Scalar>::zeros(rows, cols, mesh);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      if (g.distance(i, j) < radius) u(i, j) = contrast;
  return u;
}

/// 128x128 scene of four vertical bars of widths 8, 14, 20, 26 px at grey
/// levels 32, 96, 160, 224 on a black background, rows 16..111.
template <typename Scalar = double>
ImageGrid<Scalar> bars_image(Scalar mesh = Scalar(5)) {
  constexpr Index kStart[] = {12, 30, 54, 84};
  constexpr Index kWidth[] = {8, 14, 20, 26};
  constexpr double kGrey[] = {32, 96, 160, 224};
  ImageGrid<Scalar> u = ImageGrid<Scalar>::zeros(128, 128, mesh);
  for (int b = 0; b < 4; ++b)
    u.values.block(16, kStart[b], 96, kWidth[b]).setConstant(Scalar(kGrey[b]));
  return u;
}

/// 254x214 scene: one filled triangle (grey 200) on background 25, vertices
/// at (row, col) = (30, 107), (222, 22), (210, 192).
template <typename Scalar = double>
ImageGrid<Scalar> triangle_image(Scalar mesh = Scalar(5)) {
  const double v[3][2] = {{30, 107}, {222, 22}, {210, 192}};
  auto edge = [&](int a, int b, double r, double c) {
    return (v[b][0] - v[a][0]) * (c - v[a][1]) - (v[b][1] - v[a][1]) * (r - v[a][0]);
  };
  ImageGrid<Scalar> u = ImageGrid<Scalar>::constant(254, 214, Scalar(25), mesh);
  for (Index j = 0; j < 214; ++j)
    for (Index i = 0; i < 254; ++i) {
      const double r = i + 0.5, c = j + 0.5;
      const double e0 = edge(0, 1, r, c), e1 = edge(1, 2, r, c), e2 = edge(2, 0, r, c);
      if ((e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0))
        u(i, j) = Scalar(200);
    }
  return u;
}

namespace detail {
/// Uniform on (0, 1] from the top 53 bits.
inline double unit_open_closed(std::mt19937_64& g) {
  return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
}
}  // namespace detail

/// u + n, n ~ N(mean, sigma^2) i.i.d. via Box-Muller; no clamping.
template <typename Scalar>
ImageGrid<Scalar> add_gaussian_noise(const ImageGrid<Scalar>& u, const NoiseSpec& spec) {
  if (spec.sigma < 0) throw std::invalid_argument("noise sigma must be nonnegative");
  ImageGrid<Scalar> out = u;
  if (spec.sigma == 0 && spec.mean == 0) return out;
  std::mt19937_64 gen(spec.seed);
  Scalar* p = out.values.data();
  const Index n = out.size();
  for (Index k = 0; k < n; k += 2) {
    const double r = std::sqrt(-2.0 * std::log(detail::unit_open_closed(gen)));
    const double t = 2.0 * std::numbers::pi * detail::unit_open_closed(gen);
    p[k] += static_cast<Scalar>(spec.mean + spec.sigma * r * std::cos(t));
    if (k + 1 < n) p[k + 1] += static_cast<Scalar>(spec.mean + spec.sigma * r * std::sin(t));
  }
  return out;
}

/// Each pixel missing independently with probability `fraction`.
inline Mask random_mask(Index rows, Index cols, double fraction, std::uint64_t seed) {
  if (fraction < 0 || fraction >= 1)
    throw std::invalid_argument("mask fraction must lie in [0, 1)");
  std::mt19937_64 gen(seed);
  Mask m(rows, cols);
  bool* p = m.data();
  for (Index k = 0; k < m.size(); ++k) p[k] = detail::unit_open_closed(gen) <= fraction;
  return m;
}

}  // namespace satv

#endif  // SATV_SYNTH_HPP_
