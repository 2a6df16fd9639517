// Spatially adaptive weights alpha(u), beta(u) and the Weingarten map of the
// image surface (x, u(x)).
#ifndef SATV_WEIGHTS_HPP_
#define SATV_WEIGHTS_HPP_

#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>

#include "satv/grid.hpp"

namespace satv {

/// beta(u) = 1 / sqrt(1 + |grad u|^2), in (0, 1].
template <typename Scalar>
ImageGrid<Scalar> beta_field(const ImageGrid<Scalar>& u) {
  const Vec2Field<Scalar> g = grad(u);
  ImageGrid<Scalar> b;
  b.h = u.h;
  b.values = (Scalar(1) + g[0].square() + g[1].square()).rsqrt();
  return b;
}

/// alpha(u) = |grad beta(u)|, using the same forward-difference gradient.
template <typename Scalar>
ImageGrid<Scalar> alpha_field(const ImageGrid<Scalar>& u) {
  ImageGrid<Scalar> a;
  a.h = u.h;
  a.values = grad(beta_field(u)).magnitude();
  return a;
}

/// Discrete Weingarten map W_ab = (D_a beta) (D_b u) + beta * (hess u)_ab
/// together with its pointwise Frobenius norm.
template <typename Scalar>
std::pair<Hess4Field<Scalar>, ImageGrid<Scalar>> weingarten_field(
    const ImageGrid<Scalar>& u) {
  const Vec2Field<Scalar> gu = grad(u);
  const ImageGrid<Scalar> beta = beta_field(u);
  const Vec2Field<Scalar> gb = grad(beta);
  Hess4Field<Scalar> W = hess(u);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      auto& wab = W[2 * a + b];
      wab = gb[a] * gu[b] + beta.values * wab;
    }
  ImageGrid<Scalar> norm;
  norm.h = u.h;
  norm.values = W.magnitude();
  return {std::move(W), std::move(norm)};
}

// ---------------------------------------------------------------------------
// Weight modes.

namespace weight_mode {
/// Recompute from the newest iterate on every sweep.
struct Dynamic {};
/// Compute once from the observed image f.
struct Observed {};
/// Compute once from a supplied reference (e.g. the clean image).
template <typename Scalar>
struct Oracle {
  ImageGrid<Scalar> reference;
};
/// Uniform weights; alpha0 = 0 gives pure TV^2, beta0 = 0 pure TV.
template <typename Scalar>
struct Constant {
  Scalar alpha0 = 0;
  Scalar beta0 = 0;
};
}  // namespace weight_mode

template <typename Scalar>
using WeightMode =
    std::variant<weight_mode::Dynamic, weight_mode::Observed,
                 weight_mode::Oracle<Scalar>, weight_mode::Constant<Scalar>>;

template <typename Scalar>
struct WeightFields {
  ImageGrid<Scalar> alpha;
  ImageGrid<Scalar> beta;
};

template <typename Scalar>
WeightFields<Scalar> weights_from_image(const ImageGrid<Scalar>& u) {
  return {alpha_field(u), beta_field(u)};
}

/// Stateless weight evaluation for one mode.
template <typename Scalar>
WeightFields<Scalar> weights_for(const WeightMode<Scalar>& mode,
                                 const ImageGrid<Scalar>& u_latest,
                                 const ImageGrid<Scalar>& f) {
  using namespace weight_mode;
  if (std::holds_alternative<Dynamic>(mode)) return weights_from_image(u_latest);
  if (std::holds_alternative<Observed>(mode)) return weights_from_image(f);
  if (const auto* o = std::get_if<Oracle<Scalar>>(&mode)) {
    if (!o->reference.same_shape(f))
      throw std::invalid_argument("oracle weight reference has the wrong shape");
    ImageGrid<Scalar> ref = o->reference;
    ref.h = f.h;
    return weights_from_image(ref);
  }
  const auto& c = std::get<Constant<Scalar>>(mode);
  if (c.alpha0 < 0 || c.beta0 < 0)
    throw std::invalid_argument("constant weights must be nonnegative");
  return {ImageGrid<Scalar>::constant(f.rows(), f.cols(), c.alpha0, f.h),
          ImageGrid<Scalar>::constant(f.rows(), f.cols(), c.beta0, f.h)};
}

/// Weight provider for one solve. Only the dynamic mode recomputes; every
/// other mode is evaluated once at construction and then returned unchanged.
template <typename Scalar>
class WeightUpdater {
 public:
  WeightUpdater(WeightMode<Scalar> mode, const ImageGrid<Scalar>& f)
      : mode_(std::move(mode)) {
    if (!is_dynamic()) fixed_ = weights_for(mode_, f, f);
  }

  bool is_dynamic() const {
    return std::holds_alternative<weight_mode::Dynamic>(mode_);
  }
  bool is_constant() const {
    return std::holds_alternative<weight_mode::Constant<Scalar>>(mode_);
  }
  const WeightMode<Scalar>& mode() const { return mode_; }

  WeightFields<Scalar> update(const ImageGrid<Scalar>& u_latest) const {
    if (is_dynamic()) return weights_from_image(u_latest);
    return *fixed_;
  }

 private:
  WeightMode<Scalar> mode_;
  std::optional<WeightFields<Scalar>> fixed_;
};

}  // namespace satv

#endif  // SATV_WEIGHTS_HPP_
