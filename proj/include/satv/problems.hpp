// Restoration tasks: denoising, deblurring with a known kernel, and
// inpainting over a masked domain D.
#ifndef SATV_PROBLEMS_HPP_
#define SATV_PROBLEMS_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "satv/grid.hpp"
#include "satv/spectral.hpp"

namespace satv {

/// Odd-sized square convolution kernel with nonnegative taps summing to 1.
template <typename Scalar>
struct BlurKernel {
  Array2<Scalar> taps;

  Index size() const { return taps.rows(); }
  Index radius() const { return taps.rows() / 2; }

  static BlurKernel from_taps(Array2<Scalar> t) {
    if (t.rows() != t.cols() || t.rows() % 2 == 0)
      throw std::invalid_argument("blur kernel must be square and odd-sized");
    if ((t < Scalar(0)).any())
      throw std::invalid_argument("blur kernel taps must be nonnegative");
    const Scalar s = t.sum();
    if (!(s > Scalar(0))) throw std::invalid_argument("blur kernel sums to zero");
    return BlurKernel{t / s};
  }
};

/// Truncated Gaussian exp(-(x^2+y^2)/(2 sigma^2)) normalized to unit sum.
template <typename Scalar>
BlurKernel<Scalar> gaussian_kernel(Index size, Scalar sigma) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("gaussian kernel size must be odd and positive");
  if (!(sigma > Scalar(0))) throw std::invalid_argument("gaussian sigma must be positive");
  const Index c = size / 2;
  Array2<Scalar> t(size, size);
  for (Index i = 0; i < size; ++i)
    for (Index j = 0; j < size; ++j) {
      const Scalar x = Scalar(i - c), y = Scalar(j - c);
      t(i, j) = std::exp(-(x * x + y * y) / (Scalar(2) * sigma * sigma));
    }
  return BlurKernel<Scalar>::from_taps(std::move(t));
}

/// Box filter, every tap 1/size^2.
template <typename Scalar>
BlurKernel<Scalar> average_kernel(Index size) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("average kernel size must be odd and positive");
  return BlurKernel<Scalar>{
      Array2<Scalar>::Constant(size, size, Scalar(1) / Scalar(size * size))};
}

/// Places the kernel center at pixel (0,0) with wrap-around, so that circular
/// convolution is diagonalized exactly by the DFT.
template <typename Scalar>
Array2<Scalar> embed_kernel(const BlurKernel<Scalar>& k, Index rows, Index cols) {
  if (k.size() > rows || k.size() > cols)
    throw std::invalid_argument("blur kernel is larger than the image");
  Array2<Scalar> e = Array2<Scalar>::Zero(rows, cols);
  const Index c = k.radius();
  for (Index a = -c; a <= c; ++a)
    for (Index b = -c; b <= c; ++b)
      e((a + rows) % rows, (b + cols) % cols) += k.taps(a + c, b + c);
  return e;
}

/// Transfer function K^ of the embedded kernel.
template <typename Scalar>
ComplexArray2<Scalar> kernel_spectrum(const BlurKernel<Scalar>& k, Index rows,
                                      Index cols) {
  Fft2<Scalar> fft;
  return fft.forward(embed_kernel(k, rows, cols));
}

namespace detail {
template <typename Scalar>
ImageGrid<Scalar> apply_multiplier(const ImageGrid<Scalar>& u,
                                   const ComplexArray2<Scalar>& multiplier) {
  Fft2<Scalar> fft;
  ComplexArray2<Scalar> z = fft.forward(u.values);
  z *= multiplier;
  ImageGrid<Scalar> out;
  out.h = u.h;
  out.values = fft.inverse_real(std::move(z));
  return out;
}
}  // namespace detail

/// Circular convolution (K u)(i,j) = sum_ab k(a,b) u(i-a, j-b).
template <typename Scalar>
ImageGrid<Scalar> apply_blur(const ImageGrid<Scalar>& u, const BlurKernel<Scalar>& k) {
  return detail::apply_multiplier(u, kernel_spectrum(k, u.rows(), u.cols()));
}

/// Adjoint K* (conjugate spectrum, i.e. correlation with the kernel).
template <typename Scalar>
ImageGrid<Scalar> apply_blur_adjoint(const ImageGrid<Scalar>& u,
                                     const BlurKernel<Scalar>& k) {
  return detail::apply_multiplier(
      u, ComplexArray2<Scalar>(kernel_spectrum(k, u.rows(), u.cols()).conjugate()));
}

// ---------------------------------------------------------------------------

namespace problem {
struct Denoise {};
template <typename Scalar>
struct Deblur {
  BlurKernel<Scalar> kernel;
};
/// missing(i,j) == true marks a pixel of the inpainting domain D.
template <typename Scalar>
struct Inpaint {
  Mask missing;
  Scalar r3 = Scalar(0.005);
};
}  // namespace problem

template <typename Scalar>
using ProblemSpec = std::variant<problem::Denoise, problem::Deblur<Scalar>,
                                 problem::Inpaint<Scalar>>;

template <typename Scalar>
void validate_problem(const ProblemSpec<Scalar>& p, Index rows, Index cols) {
  if (const auto* d = std::get_if<problem::Deblur<Scalar>>(&p)) {
    if (d->kernel.size() > rows || d->kernel.size() > cols)
      throw std::invalid_argument("blur kernel is larger than the image");
    if (std::abs(d->kernel.taps.sum() - Scalar(1)) > Scalar(1e-12) * Scalar(100))
      throw std::invalid_argument("blur kernel is not normalized");
  }
  if (const auto* in = std::get_if<problem::Inpaint<Scalar>>(&p)) {
    if (in->missing.rows() != rows || in->missing.cols() != cols)
      throw std::invalid_argument("inpainting mask shape does not match the image");
    if (in->missing.all())
      throw std::invalid_argument("inpainting mask leaves no known pixel");
    if (!(in->r3 > Scalar(0))) throw std::invalid_argument("r3 must be positive");
  }
}

/// Pointwise minimizer of the z-subproblem for the splitting z = u:
/// known pixels z = (f/lambda + r3 u + lam3) / (1/lambda + r3),
/// missing pixels z = u + lam3 / r3.
template <typename Scalar>
ImageGrid<Scalar> update_z_inpaint(const ImageGrid<Scalar>& u,
                                   const ImageGrid<Scalar>& f, const Mask& missing,
                                   Scalar lambda, Scalar r3,
                                   const ImageGrid<Scalar>& lam3) {
  ImageGrid<Scalar> z;
  z.h = u.h;
  const Array2<Scalar> known =
      (f.values / lambda + r3 * u.values + lam3.values) / (Scalar(1) / lambda + r3);
  const Array2<Scalar> filled = u.values + lam3.values / r3;
  z.values = missing.select(filled, known);
  return z;
}

/// lam3 += r3 (u - z).
template <typename Scalar>
void update_lam3(ImageGrid<Scalar>& lam3, const ImageGrid<Scalar>& u,
                 const ImageGrid<Scalar>& z, Scalar r3) {
  lam3.values += r3 * (u.values - z.values);
}

}  // namespace satv

#endif  // SATV_PROBLEMS_HPP_
