// Radially symmetric smooth approximations of a sharp disk and the integral
// quantities used to check contrast preservation of the Weingarten
// regularizer.
#ifndef SATV_ANALYSIS_HPP_
#define SATV_ANALYSIS_HPP_

#include <vector>

#include "satv/grid.hpp"
#include "satv/synth.hpp"

namespace satv {

/// u(r) = height for r <= inner, 0 for r >= outer, joined by a quintic
/// smoothstep centered at R whose steepest slope u'(R) = -steepness.
/// The ramp is C^2 with u'' <= 0 on (0, R) and u'' >= 0 on (R, 2R).
class RadialProfile {
 public:
  /// Requires steepness > 2 height / R.
  static RadialProfile smooth_disk(double radius, double height, double steepness);

  double value(double r) const;
  double slope(double r) const;      // u'(r)
  double curvature(double r) const;  // u''(r)

  double radius() const { return radius_; }
  double height() const { return height_; }
  double steepness() const { return steepness_; }
  double inner() const { return radius_ - 0.5 * width_; }
  double outer() const { return radius_ + 0.5 * width_; }

 private:
  RadialProfile(double radius, double height, double steepness);
  double t_of(double r) const { return (r - inner()) / width_; }

  double radius_, height_, steepness_, width_;
};

/// |W_u| of a radial surface z = u(r):
/// sqrt((u''/(1+u'^2)^{3/2})^2 + (u'/(r sqrt(1+u'^2)))^2), r > 0.
double radial_weingarten_norm(double du, double d2u, double r);
double radial_weingarten_norm(const RadialProfile& p, double r);

/// 2 pi int_0^{2R} r |W_u| dr by adaptive Gauss-Kronrod (relative tol 1e-6).
double weingarten_integral(const RadialProfile& p);

/// Lower and upper bounds sandwiching weingarten_integral:
///   -4 pi R g(R) + 4 pi int_0^R g      and      -4 pi R g(R) - 4 pi int_R^{2R} g
/// with g = u' / sqrt(1 + u'^2).
struct SandwichBounds {
  double lower = 0;
  double upper = 0;
};
SandwichBounds weingarten_bounds(const RadialProfile& p);

/// 2 pi int r |u'| dr; tends to 2 pi R h for the sharp disk.
double tv_integral(const RadialProfile& p);

/// lhs = int (f - u)^2 over the disk domain, rhs = -pi h^3 R / (12 u'(R)).
struct FidelityBound {
  double lhs = 0;
  double rhs = 0;
  bool holds() const { return lhs >= rhs; }
};
FidelityBound fidelity_lower_bound_check(const RadialProfile& p);
/// Same bound for the 1/(2 lambda)-weighted fidelity term:
/// lhs / (2 lambda) >= -pi h^3 R / (24 lambda u'(R)).
FidelityBound weighted_fidelity_bound(const RadialProfile& p, double lambda);

struct SweepRow {
  double factor = 0;     // steepness in units of 2h/R
  double steepness = 0;
  double integral = 0;
  double target = 0;     // 4 pi R
  double rel_error = 0;  // |integral - target| / target
  SandwichBounds bounds;
  bool bounds_hold = false;
  FidelityBound fidelity;
  double tv = 0;
  double tv_target = 0;  // 2 pi R h
};

std::vector<SweepRow> steepness_sweep(double radius, double height,
                                      const std::vector<double>& factors);

/// mean(u inside B(c, R/2)) - mean(u outside B(c, 3R/2)).
template <typename Scalar>
double contrast_of(const ImageGrid<Scalar>& u, const DiskGeometry& g) {
  double in_sum = 0, out_sum = 0;
  Index in_n = 0, out_n = 0;
  for (Index j = 0; j < u.cols(); ++j)
    for (Index i = 0; i < u.rows(); ++i) {
      const double d = g.distance(i, j);
      if (d < 0.5 * g.radius) {
        in_sum += u(i, j);
        ++in_n;
      } else if (d > 1.5 * g.radius) {
        out_sum += u(i, j);
        ++out_n;
      }
    }
  const double in_mean = in_n ? in_sum / in_n : 0.0;
  const double out_mean = out_n ? out_sum / out_n : 0.0;
  return in_mean - out_mean;
}

}  // namespace satv

#endif  // SATV_ANALYSIS_HPP_
