// Periodic image grids and the finite-difference operators acting on them.
//
// Row index i is the x direction, column index j the y direction. Every
// difference quotient divides by the mesh size h and wraps periodically
// (index M == 0, index N == 0).
#ifndef SATV_GRID_HPP_
#define SATV_GRID_HPP_

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace satv {

using Index = Eigen::Index;

template <typename Scalar>
using Array2 = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// M x N scalar field on the periodic grid with mesh size h.
template <typename Scalar>
struct ImageGrid {
  Array2<Scalar> values;
  Scalar h = Scalar(5);

  ImageGrid() = default;

  explicit ImageGrid(Array2<Scalar> v, Scalar mesh = Scalar(5))
      : values(std::move(v)), h(mesh) {
    if (values.rows() < 2 || values.cols() < 2)
      throw std::invalid_argument("ImageGrid: need at least 2x2 pixels, got " +
                                  std::to_string(values.rows()) + "x" +
                                  std::to_string(values.cols()));
    if (!(h > Scalar(0)) || !std::isfinite(static_cast<double>(h)))
      throw std::invalid_argument("ImageGrid: mesh size must be positive");
    if (!values.allFinite())
      throw std::invalid_argument("ImageGrid: non-finite pixel value");
  }

  static ImageGrid constant(Index rows, Index cols, Scalar value,
                            Scalar mesh = Scalar(5)) {
    return ImageGrid(Array2<Scalar>::Constant(rows, cols, value), mesh);
  }
  static ImageGrid zeros(Index rows, Index cols, Scalar mesh = Scalar(5)) {
    return constant(rows, cols, Scalar(0), mesh);
  }

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  Index size() const { return values.size(); }

  Scalar& operator()(Index i, Index j) { return values(i, j); }
  Scalar operator()(Index i, Index j) const { return values(i, j); }

  bool same_shape(const ImageGrid& o) const {
    return rows() == o.rows() && cols() == o.cols();
  }
};

/// Per-pixel K-vector field stored as K separate M x N component arrays.
template <typename Scalar, int K>
struct Field {
  static constexpr int kComponents = K;
  std::array<Array2<Scalar>, K> c;
  Scalar h = Scalar(5);

  static Field zeros(Index rows, Index cols, Scalar mesh = Scalar(5)) {
    Field f;
    for (auto& a : f.c) a = Array2<Scalar>::Zero(rows, cols);
    f.h = mesh;
    return f;
  }

  Index rows() const { return c[0].rows(); }
  Index cols() const { return c[0].cols(); }

  Array2<Scalar>& operator[](int k) { return c[k]; }
  const Array2<Scalar>& operator[](int k) const { return c[k]; }

  /// Pointwise Euclidean magnitude over the K components.
  Array2<Scalar> magnitude() const {
    Array2<Scalar> s = c[0].square();
    for (int k = 1; k < K; ++k) s += c[k].square();
    return s.sqrt();
  }

  bool all_finite() const {
    for (const auto& a : c)
      if (!a.allFinite()) return false;
    return true;
  }

  Field& operator+=(const Field& o) {
    for (int k = 0; k < K; ++k) c[k] += o.c[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    for (int k = 0; k < K; ++k) c[k] -= o.c[k];
    return *this;
  }
  Field& operator*=(Scalar s) {
    for (auto& a : c) a *= s;
    return *this;
  }
};

template <typename Scalar, int K>
Field<Scalar, K> operator+(Field<Scalar, K> a, const Field<Scalar, K>& b) {
  return a += b;
}
template <typename Scalar, int K>
Field<Scalar, K> operator-(Field<Scalar, K> a, const Field<Scalar, K>& b) {
  return a -= b;
}
template <typename Scalar, int K>
Field<Scalar, K> operator*(Scalar s, Field<Scalar, K> a) {
  return a *= s;
}

/// Gradient-shaped field (p1, p2): houses v, lambda_1 and grad u.
template <typename Scalar>
using Vec2Field = Field<Scalar, 2>;

/// Hessian-shaped field (w11, w12, w21, w22): houses w, lambda_2 and hess u.
template <typename Scalar>
using Hess4Field = Field<Scalar, 4>;

// ---------------------------------------------------------------------------
// One-directional periodic differences on raw arrays.

template <typename Scalar>
Array2<Scalar> forward_x(const Array2<Scalar>& u, Scalar h) {
  const Index m = u.rows();
  Array2<Scalar> d(m, u.cols());
  d.topRows(m - 1) = u.bottomRows(m - 1) - u.topRows(m - 1);
  d.row(m - 1) = u.row(0) - u.row(m - 1);
  return d / h;
}

template <typename Scalar>
Array2<Scalar> backward_x(const Array2<Scalar>& u, Scalar h) {
  const Index m = u.rows();
  Array2<Scalar> d(m, u.cols());
  d.row(0) = u.row(0) - u.row(m - 1);
  d.bottomRows(m - 1) = u.bottomRows(m - 1) - u.topRows(m - 1);
  return d / h;
}

template <typename Scalar>
Array2<Scalar> forward_y(const Array2<Scalar>& u, Scalar h) {
  const Index n = u.cols();
  Array2<Scalar> d(u.rows(), n);
  d.leftCols(n - 1) = u.rightCols(n - 1) - u.leftCols(n - 1);
  d.col(n - 1) = u.col(0) - u.col(n - 1);
  return d / h;
}

template <typename Scalar>
Array2<Scalar> backward_y(const Array2<Scalar>& u, Scalar h) {
  const Index n = u.cols();
  Array2<Scalar> d(u.rows(), n);
  d.col(0) = u.col(0) - u.col(n - 1);
  d.rightCols(n - 1) = u.rightCols(n - 1) - u.leftCols(n - 1);
  return d / h;
}

// ---------------------------------------------------------------------------
// Gradient / divergence and Hessian / second-order divergence pairs.

/// Forward-difference gradient.
template <typename Scalar>
Vec2Field<Scalar> grad(const ImageGrid<Scalar>& u) {
  Vec2Field<Scalar> p;
  p.h = u.h;
  p[0] = forward_x(u.values, u.h);
  p[1] = forward_y(u.values, u.h);
  return p;
}

/// Backward-difference divergence, the negative adjoint of grad.
template <typename Scalar>
ImageGrid<Scalar> div(const Vec2Field<Scalar>& p) {
  ImageGrid<Scalar> out;
  out.h = p.h;
  out.values = backward_x(p[0], p.h) + backward_y(p[1], p.h);
  return out;
}

/// w_ab = D_a^+ D_b^+ u with components ordered (xx, xy, yx, yy).
/// Forward differences commute, so w12 == w21.
template <typename Scalar>
Hess4Field<Scalar> hess(const ImageGrid<Scalar>& u) {
  const Scalar h = u.h;
  const Array2<Scalar> ux = forward_x(u.values, h);
  const Array2<Scalar> uy = forward_y(u.values, h);
  Hess4Field<Scalar> w;
  w.h = h;
  w[0] = forward_x(ux, h);
  w[1] = forward_x(uy, h);
  w[2] = forward_y(ux, h);
  w[3] = forward_y(uy, h);
  return w;
}

/// Adjoint of hess: sum_ab D_b^- D_a^- w_ab.
template <typename Scalar>
ImageGrid<Scalar> div2(const Hess4Field<Scalar>& w) {
  const Scalar h = w.h;
  // w[1] is D_x^+ D_y^+ u, so its adjoint applies D_x^- first, then D_y^-.
  ImageGrid<Scalar> out;
  out.h = h;
  out.values = backward_x(backward_x(w[0], h), h) +
               backward_y(backward_x(w[1], h), h) +
               backward_x(backward_y(w[2], h), h) +
               backward_y(backward_y(w[3], h), h);
  return out;
}

// ---------------------------------------------------------------------------
// Plain Euclidean inner products and l1 norms (no mesh weighting).

template <typename Scalar>
Scalar inner(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b) {
  return (a.values * b.values).sum();
}

template <typename Scalar, int K>
Scalar inner(const Field<Scalar, K>& a, const Field<Scalar, K>& b) {
  Scalar s(0);
  for (int k = 0; k < K; ++k) s += (a[k] * b[k]).sum();
  return s;
}

template <typename Scalar>
Scalar l1_norm(const ImageGrid<Scalar>& a) {
  return a.values.abs().sum();
}

/// Sum of absolute values of every component.
template <typename Scalar, int K>
Scalar l1_norm(const Field<Scalar, K>& a) {
  Scalar s(0);
  for (int k = 0; k < K; ++k) s += a[k].abs().sum();
  return s;
}

}  // namespace satv

#endif  // SATV_GRID_HPP_
