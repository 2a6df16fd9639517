// Fourier-domain machinery for the periodic grid: 2-D transforms, the
// symbol of -div(grad), and the one-shot solve of the u-subproblem.
#ifndef SATV_SPECTRAL_HPP_
#define SATV_SPECTRAL_HPP_

#include <unsupported/Eigen/FFT>

#include <cassert>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "satv/grid.hpp"

namespace satv {

template <typename Scalar>
using ComplexArray2 = Array2<std::complex<Scalar>>;

/// 2-D DFT built from 1-D transforms along columns then rows.
/// Holds its own plan cache, so one instance must not be shared across threads.
template <typename Scalar>
class Fft2 {
 public:
  using Complex = std::complex<Scalar>;

  ComplexArray2<Scalar> forward(const Array2<Scalar>& u) {
    ComplexArray2<Scalar> z = u.template cast<Complex>();
    transform(z, /*inverse=*/false);
    return z;
  }

  ComplexArray2<Scalar> forward(ComplexArray2<Scalar> z) {
    transform(z, false);
    return z;
  }

  /// Inverse transform of a conjugate-symmetric spectrum; the imaginary
  /// residue is dropped.
  Array2<Scalar> inverse_real(ComplexArray2<Scalar> z) {
    transform(z, true);
#ifndef NDEBUG
    const Scalar scale = std::max(Scalar(1), z.real().abs().maxCoeff());
    const Scalar tol =
        std::max(Scalar(1e-10), Scalar(100) * std::numeric_limits<Scalar>::epsilon());
    assert(z.imag().abs().maxCoeff() <= tol * scale);
#endif
    return z.real();
  }

 private:
  void transform(ComplexArray2<Scalar>& z, bool inverse) {
    const Index m = z.rows();
    const Index n = z.cols();
    buf_in_.resize(static_cast<std::size_t>(std::max(m, n)));
    buf_out_.resize(buf_in_.size());
    // Columns are contiguous in column-major storage.
    for (Index j = 0; j < n; ++j) {
      Complex* col = z.col(j).data();
      std::copy(col, col + m, buf_in_.begin());
      if (inverse)
        fft_.inv(buf_out_.data(), buf_in_.data(), m);
      else
        fft_.fwd(buf_out_.data(), buf_in_.data(), m);
      std::copy(buf_out_.begin(), buf_out_.begin() + m, col);
    }
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) buf_in_[j] = z(i, j);
      if (inverse)
        fft_.inv(buf_out_.data(), buf_in_.data(), n);
      else
        fft_.fwd(buf_out_.data(), buf_in_.data(), n);
      for (Index j = 0; j < n; ++j) z(i, j) = buf_out_[j];
    }
  }

  Eigen::FFT<Scalar> fft_;
  std::vector<Complex> buf_in_, buf_out_;
};

/// Eigenvalues of -div(grad) under periodic boundaries:
/// S(k,l) = (4 sin^2(pi k/M) + 4 sin^2(pi l/N)) / h^2.
template <typename Scalar>
Array2<Scalar> first_order_symbol(Index rows, Index cols, Scalar h) {
  if (rows < 2 || cols < 2)
    throw std::invalid_argument("first_order_symbol: grid must be at least 2x2");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> sx(rows), sy(cols);
  for (Index k = 0; k < rows; ++k) {
    const Scalar s = std::sin(pi * Scalar(k) / Scalar(rows));
    sx(k) = Scalar(4) * s * s;
  }
  for (Index l = 0; l < cols; ++l) {
    const Scalar s = std::sin(pi * Scalar(l) / Scalar(cols));
    sy(l) = Scalar(4) * s * s;
  }
  Array2<Scalar> S = sx.replicate(1, cols) + sy.transpose().replicate(rows, 1);
  return S / (h * h);
}

/// Positive Fourier multiplier Z + r1 S + r2 S^2 of the u-subproblem, where
/// Z is the zero-order (fidelity + proximal) part.
template <typename Scalar>
struct SpectralDenominator {
  Array2<Scalar> values;
  Array2<Scalar> zero_order;
  Scalar r1 = 0;
  Scalar r2 = 0;
  Scalar h = 5;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

template <typename Scalar>
SpectralDenominator<Scalar> make_denominator(Array2<Scalar> zero_order,
                                             Scalar r1, Scalar r2, Scalar h) {
  SpectralDenominator<Scalar> d;
  const Array2<Scalar> S = first_order_symbol(zero_order.rows(), zero_order.cols(), h);
  d.values = zero_order + r1 * S + r2 * S.square();
  d.zero_order = std::move(zero_order);
  d.r1 = r1;
  d.r2 = r2;
  d.h = h;
  if (!(d.values > Scalar(0)).all() || !d.values.allFinite())
    throw std::invalid_argument(
        "spectral denominator has a non-positive entry; check lambda, mu and r3");
  return d;
}

/// Solves D(u) = rhs: transform(u) = transform(rhs) / D.
template <typename Scalar>
ImageGrid<Scalar> spectral_solve(const ImageGrid<Scalar>& rhs,
                                 const SpectralDenominator<Scalar>& d,
                                 Fft2<Scalar>& fft) {
  if (rhs.rows() != d.rows() || rhs.cols() != d.cols())
    throw std::invalid_argument("spectral_solve: shape mismatch");
  ComplexArray2<Scalar> z = fft.forward(rhs.values);
  z /= d.values.template cast<std::complex<Scalar>>();
  ImageGrid<Scalar> u;
  u.h = rhs.h;
  u.values = fft.inverse_real(std::move(z));
  return u;
}

template <typename Scalar>
ImageGrid<Scalar> spectral_solve(const ImageGrid<Scalar>& rhs,
                                 const SpectralDenominator<Scalar>& d) {
  Fft2<Scalar> fft;
  return spectral_solve(rhs, d, fft);
}

}  // namespace satv

#endif  // SATV_SPECTRAL_HPP_
