// Independent reference implementations used as test oracles: plain loops
// with modulo indexing, no Eigen block expressions and no transforms.
#ifndef SATV_TESTS_ORACLES_HPP_
#define SATV_TESTS_ORACLES_HPP_

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "satv/grid.hpp"

namespace oracle {

using satv::Array2;
using satv::Index;

inline Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

inline Array2<double> random_array(std::mt19937_64& g, Index rows, Index cols,
                                   double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  Array2<double> a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = d(g);
  return a;
}

inline satv::ImageGrid<double> random_grid(std::mt19937_64& g, Index rows, Index cols,
                                           double h = 5, double lo = -1, double hi = 1) {
  return satv::ImageGrid<double>(random_array(g, rows, cols, lo, hi), h);
}

template <int K>
satv::Field<double, K> random_field(std::mt19937_64& g, Index rows, Index cols, double h = 5) {
  satv::Field<double, K> f;
  f.h = h;
  for (auto& c : f.c) c = random_array(g, rows, cols);
  return f;
}

/// Forward difference along rows (a = 0) or columns (a = 1).
inline Array2<double> fwd(const Array2<double>& u, int a, double h) {
  const Index m = u.rows(), n = u.cols();
  Array2<double> r(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      const double next = a == 0 ? u(wrap(i + 1, m), j) : u(i, wrap(j + 1, n));
      r(i, j) = (next - u(i, j)) / h;
    }
  return r;
}

inline Array2<double> bwd(const Array2<double>& u, int a, double h) {
  const Index m = u.rows(), n = u.cols();
  Array2<double> r(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      const double prev = a == 0 ? u(wrap(i - 1, m), j) : u(i, wrap(j - 1, n));
      r(i, j) = (u(i, j) - prev) / h;
    }
  return r;
}

inline std::array<Array2<double>, 2> grad(const Array2<double>& u, double h) {
  return {fwd(u, 0, h), fwd(u, 1, h)};
}

inline Array2<double> div(const std::array<Array2<double>, 2>& p, double h) {
  return bwd(p[0], 0, h) + bwd(p[1], 1, h);
}

/// Components (xx, xy, yx, yy) with w_ab = D_a^+ D_b^+ u.
inline std::array<Array2<double>, 4> hess(const Array2<double>& u, double h) {
  std::array<Array2<double>, 4> w;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) w[2 * a + b] = fwd(fwd(u, b, h), a, h);
  return w;
}

inline Array2<double> div2(const std::array<Array2<double>, 4>& w, double h) {
  Array2<double> r = Array2<double>::Zero(w[0].rows(), w[0].cols());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) r += bwd(bwd(w[2 * a + b], a, h), b, h);
  return r;
}

inline double dot(const Array2<double>& a, const Array2<double>& b) {
  double s = 0;
  for (Index k = 0; k < a.size(); ++k) s += a.data()[k] * b.data()[k];
  return s;
}

/// Direct circular convolution with the kernel centered at offset (0, 0).
inline Array2<double> circular_convolve(const Array2<double>& u, const Array2<double>& k) {
  const Index m = u.rows(), n = u.cols(), c = k.rows() / 2;
  Array2<double> r = Array2<double>::Zero(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index a = 0; a < k.rows(); ++a)
        for (Index b = 0; b < k.cols(); ++b)
          r(i, j) += k(a, b) * u(wrap(i - (a - c), m), wrap(j - (b - c), n));
  return r;
}

/// Naive 2-D DFT, X(k,l) = sum u(i,j) exp(-2 pi i (ik/M + jl/N)).
inline Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic> dft(
    const Array2<double>& u) {
  const Index m = u.rows(), n = u.cols();
  Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic> X(m, n);
  for (Index k = 0; k < m; ++k)
    for (Index l = 0; l < n; ++l) {
      std::complex<double> s = 0;
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
          const double ang = -2 * M_PI * (double(i * k) / m + double(j * l) / n);
          s += u(i, j) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
      X(k, l) = s;
    }
  return X;
}

/// Objective  alpha sum|grad u| + beta sum|hess u| + |u - f|^2 / (2 lambda)
/// with uniform weights and pixelwise Euclidean norms.
inline double objective(const Array2<double>& u, const Array2<double>& f, double alpha,
                        double beta, double lambda, double h) {
  const auto g = grad(u, h);
  const auto w = hess(u, h);
  double s = 0;
  for (Index k = 0; k < u.size(); ++k) {
    const double gn = std::hypot(g[0].data()[k], g[1].data()[k]);
    double wn = 0;
    for (const auto& c : w) wn += c.data()[k] * c.data()[k];
    const double d = u.data()[k] - f.data()[k];
    s += alpha * gn + beta * std::sqrt(wn) + d * d / (2 * lambda);
  }
  return s;
}

/// Minimizes objective() through its dual
///   min_{|p| <= alpha, |q| <= beta} (lambda/2) |B(p,q) - f/lambda|^2,
///   B(p,q) = -div p + div2 q,   u = f - lambda B(p,q),
/// by FISTA with projection onto the pointwise balls. Returns u.
inline Array2<double> dual_projected_gradient(const Array2<double>& f, double alpha,
                                              double beta, double lambda, double h,
                                              int iterations) {
  const Index m = f.rows(), n = f.cols();
  const bool first = alpha > 0, second = beta > 0;
  // ||B||^2 <= max(S + S^2) <= 8/h^2 + 64/h^4.
  const double L = lambda * ((first ? 8 / (h * h) : 0) + (second ? 64 / (h * h * h * h) : 0));
  const double step = 1 / L;
  std::array<Array2<double>, 2> p{Array2<double>::Zero(m, n), Array2<double>::Zero(m, n)};
  std::array<Array2<double>, 4> q;
  for (auto& c : q) c = Array2<double>::Zero(m, n);
  auto yp = p, p_old = p;
  auto yq = q, q_old = q;
  auto apply_b = [&](const auto& pp, const auto& qq) {
    Array2<double> b = Array2<double>::Zero(m, n);
    if (first) b -= div(pp, h);
    if (second) b += div2(qq, h);
    return b;
  };
  double t = 1;
  for (int it = 0; it < iterations; ++it) {
    const Array2<double> r = lambda * apply_b(yp, yq) - f;  // lambda (B y - f/lambda)
    if (first) {
      const auto gr = grad(r, h);  // B^T = (grad, hess)
      for (int c = 0; c < 2; ++c) p[c] = yp[c] - step * gr[c];
      for (Index k = 0; k < m * n; ++k) {
        const double nrm = std::hypot(p[0].data()[k], p[1].data()[k]);
        if (nrm > alpha)
          for (int c = 0; c < 2; ++c) p[c].data()[k] *= alpha / nrm;
      }
    }
    if (second) {
      const auto hr = hess(r, h);
      for (int c = 0; c < 4; ++c) q[c] = yq[c] - step * hr[c];
      for (Index k = 0; k < m * n; ++k) {
        double nrm = 0;
        for (int c = 0; c < 4; ++c) nrm += q[c].data()[k] * q[c].data()[k];
        nrm = std::sqrt(nrm);
        if (nrm > beta)
          for (int c = 0; c < 4; ++c) q[c].data()[k] *= beta / nrm;
      }
    }
    const double t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
    const double mom = (t - 1) / t_next;
    for (int c = 0; c < 2; ++c) yp[c] = p[c] + mom * (p[c] - p_old[c]);
    for (int c = 0; c < 4; ++c) yq[c] = q[c] + mom * (q[c] - q_old[c]);
    p_old = p;
    q_old = q;
    t = t_next;
  }
  return f - lambda * apply_b(p, q);
}

}  // namespace oracle

#endif  // SATV_TESTS_ORACLES_HPP_
