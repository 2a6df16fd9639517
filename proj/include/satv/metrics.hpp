// PSNR and SSIM on the 0-255 intensity scale.
#ifndef SATV_METRICS_HPP_
#define SATV_METRICS_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "satv/grid.hpp"

namespace satv {

inline constexpr Index kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kPeak = 255.0;

struct QualityReport {
  double mse = 0;
  double psnr_db = 0;  // +infinity when mse == 0
  double ssim = 1;
};

namespace detail {
template <typename Scalar>
void require_same_shape(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b,
                        const char* who) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

/// 'valid' separable correlation with a symmetric 1-D window.
inline Array2<double> filter_valid(const Array2<double>& x,
                                   const Eigen::ArrayXd& win) {
  const Index k = win.size();
  const Index m = x.rows() - k + 1, n = x.cols() - k + 1;
  Array2<double> t = Array2<double>::Zero(m, x.cols());
  for (Index a = 0; a < k; ++a) t += win(a) * x.middleRows(a, m);
  Array2<double> out = Array2<double>::Zero(m, n);
  for (Index b = 0; b < k; ++b) out += win(b) * t.middleCols(b, n);
  return out;
}
}  // namespace detail

template <typename Scalar>
double mse(const ImageGrid<Scalar>& reference, const ImageGrid<Scalar>& candidate) {
  detail::require_same_shape(reference, candidate, "mse");
  return (reference.values.template cast<double>() - candidate.values.template cast<double>())
      .square()
      .mean();
}

/// 10 log10(255^2 / MSE); +infinity for identical inputs.
inline double psnr_from_mse(double m) {
  if (m == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPeak * kPeak / m);
}

template <typename Scalar>
double psnr(const ImageGrid<Scalar>& reference, const ImageGrid<Scalar>& candidate) {
  return psnr_from_mse(mse(reference, candidate));
}

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// evaluated over window positions fully inside the image.
template <typename Scalar>
double ssim(const ImageGrid<Scalar>& reference, const ImageGrid<Scalar>& candidate) {
  detail::require_same_shape(reference, candidate, "ssim");
  if (std::min(reference.rows(), reference.cols()) < kSsimWindow)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  Eigen::ArrayXd win(kSsimWindow);
  const double c = (kSsimWindow - 1) / 2.0;
  for (Index i = 0; i < kSsimWindow; ++i)
    win(i) = std::exp(-(i - c) * (i - c) / (2 * kSsimSigma * kSsimSigma));
  win /= win.sum();

  const double c1 = (0.01 * kPeak) * (0.01 * kPeak);
  const double c2 = (0.03 * kPeak) * (0.03 * kPeak);
  const Array2<double> x = reference.values.template cast<double>();
  const Array2<double> y = candidate.values.template cast<double>();
  const Array2<double> mx = detail::filter_valid(x, win);
  const Array2<double> my = detail::filter_valid(y, win);
  const Array2<double> sxx = detail::filter_valid(x.square(), win) - mx.square();
  const Array2<double> syy = detail::filter_valid(y.square(), win) - my.square();
  const Array2<double> sxy = detail::filter_valid(x * y, win) - mx * my;
  const Array2<double> map = ((2 * mx * my + c1) * (2 * sxy + c2)) /
                             ((mx.square() + my.square() + c1) * (sxx + syy + c2));
  return map.mean();
}

template <typename Scalar>
QualityReport quality(const ImageGrid<Scalar>& reference, const ImageGrid<Scalar>& candidate) {
  QualityReport q;
  q.mse = mse(reference, candidate);
  q.psnr_db = psnr_from_mse(q.mse);
  q.ssim = ssim(reference, candidate);
  return q;
}

}  // namespace satv

#endif  // SATV_METRICS_HPP_
