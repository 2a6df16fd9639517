#include "satv/analysis.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace satv {

namespace {

constexpr double kPi = std::numbers::pi;
// Peak of the quintic smoothstep derivative, S'(1/2) = 30/16.
constexpr double kSmoothstepPeak = 1.875;

double smoothstep(double t) { return t * t * t * (t * (6 * t - 15) + 10); }
double smoothstep_d1(double t) { return 30 * t * t * (1 - t) * (1 - t); }
double smoothstep_d2(double t) { return 60 * t * (1 - t) * (1 - 2 * t); }

struct Quad {
  double value = 0, error = 0, l1 = 0;
};

Quad gk(const std::function<double(double)>& f, double a, double b, double rtol) {
  Quad q;
  if (b <= a) return q;
  q.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rtol,
                                                                          &q.error, &q.l1);
  return q;
}

/// Ramp coordinates t in [0, 1/2] where |u'| crosses a power of ten. The
/// integrands change character at |u'| ~ 1 and vary sharply where u' is small
/// and u'' large, so panels between these points are each smooth.
std::vector<double> ramp_breakpoints(const RadialProfile& p) {
  const double w = p.outer() - p.inner();
  std::vector<double> t = {0.0};
  for (double m = 1e-3; m < p.steepness(); m *= 10) {
    // S' is increasing on [0, 1/2]; solve h S'(t) / w = m by bisection.
    double lo = 0, hi = 0.5;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (p.height() * smoothstep_d1(mid) / w < m ? lo : hi) = mid;
    }
    t.push_back(0.5 * (lo + hi));
  }
  t.push_back(0.5);
  return t;
}

/// int g(r) dr over one half of the transition band, written in the ramp
/// coordinate r = inner + t w so that integrands see exact t values near the
/// band ends. `inner_half` selects (inner, R), otherwise (R, outer).
/// Throws unless the summed error estimate meets rtol against the summed L1.
double integrate_half(const RadialProfile& p, const std::function<double(double, double)>& g,
                      bool inner_half, double rtol) {
  const double w = p.outer() - p.inner();
  const std::vector<double> t = ramp_breakpoints(p);
  // g receives (t, r); on the outer half t runs over (1/2, 1) via s = 1 - t.
  const std::function<double(double)> f = [&](double s) {
    const double tt = inner_half ? s : 1 - s;
    return w * g(tt, p.inner() + tt * w);
  };
  Quad total;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const Quad q = gk(f, t[k], t[k + 1], rtol);
    total.value += q.value;
    total.error += q.error;
    total.l1 += q.l1;
  }
  if (!std::isfinite(total.value) || total.error > 10 * rtol * total.l1 + 1e-300)
    throw std::runtime_error(std::string("quadrature did not converge on the ") +
                             (inner_half ? "inner" : "outer") + " half of the ramp");
  return total.value;
}

double integrate_band(const RadialProfile& p, const std::function<double(double, double)>& g,
                      double rtol) {
  return integrate_half(p, g, true, rtol) + integrate_half(p, g, false, rtol);
}

/// u'(r) and u''(r) from the ramp coordinate.
double ramp_slope(const RadialProfile& p, double t) {
  return -p.height() * smoothstep_d1(t) / (p.outer() - p.inner());
}
double ramp_curvature(const RadialProfile& p, double t) {
  const double w = p.outer() - p.inner();
  return -p.height() * smoothstep_d2(t) / (w * w);
}

double normal_slope(double du) { return du / std::sqrt(1 + du * du); }

}  // namespace

RadialProfile::RadialProfile(double radius, double height, double steepness)
    : radius_(radius),
      height_(height),
      steepness_(steepness),
      width_(kSmoothstepPeak * height / steepness) {}

RadialProfile RadialProfile::smooth_disk(double radius, double height, double steepness) {
  if (!(radius > 0) || !(height > 0))
    throw std::invalid_argument("radial profile needs positive radius and height");
  if (!(steepness > 2 * height / radius))
    throw std::invalid_argument("steepness must exceed 2h/R");
  return RadialProfile(radius, height, steepness);
}

double RadialProfile::value(double r) const {
  if (r <= inner()) return height_;
  if (r >= outer()) return 0.0;
  return height_ * (1 - smoothstep(t_of(r)));
}

double RadialProfile::slope(double r) const {
  if (r <= inner() || r >= outer()) return 0.0;
  return -height_ * smoothstep_d1(t_of(r)) / width_;
}

double RadialProfile::curvature(double r) const {
  if (r <= inner() || r >= outer()) return 0.0;
  return -height_ * smoothstep_d2(t_of(r)) / (width_ * width_);
}

double radial_weingarten_norm(double du, double d2u, double r) {
  if (!(r > 0)) throw std::invalid_argument("radial Weingarten norm needs r > 0");
  const double q = 1 + du * du;
  const double a = d2u / (q * std::sqrt(q));
  const double b = du / (r * std::sqrt(q));
  return std::sqrt(a * a + b * b);
}

double radial_weingarten_norm(const RadialProfile& p, double r) {
  return radial_weingarten_norm(p.slope(r), p.curvature(r), r);
}

double weingarten_integral(const RadialProfile& p) {
  const auto g = [&](double t, double r) {
    return r * radial_weingarten_norm(ramp_slope(p, t), ramp_curvature(p, t), r);
  };
  return 2 * kPi * integrate_band(p, g, 1e-6);
}

SandwichBounds weingarten_bounds(const RadialProfile& p) {
  const auto g = [&](double t, double) { return normal_slope(ramp_slope(p, t)); };
  const double R = p.radius();
  const double edge = -4 * kPi * R * normal_slope(p.slope(R));
  const double below = integrate_half(p, g, true, 1e-9);
  const double above = integrate_half(p, g, false, 1e-9);
  return {edge + 4 * kPi * below, edge - 4 * kPi * above};
}

double tv_integral(const RadialProfile& p) {
  const auto g = [&](double t, double r) { return r * std::abs(ramp_slope(p, t)); };
  return 2 * kPi * integrate_band(p, g, 1e-9);
}

FidelityBound fidelity_lower_bound_check(const RadialProfile& p) {
  const double h = p.height();
  // |f - u| = h S(t) inside R and h (1 - S(t)) = h S(1 - t) outside.
  const auto g = [&](double t, double r) {
    const double d = h * smoothstep(t < 0.5 ? t : 1 - t);
    return r * d * d;
  };
  FidelityBound b;
  b.lhs = 2 * kPi * integrate_band(p, g, 1e-9);
  b.rhs = -kPi * h * h * h * p.radius() / (12 * p.slope(p.radius()));
  return b;
}

FidelityBound weighted_fidelity_bound(const RadialProfile& p, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  const FidelityBound plain = fidelity_lower_bound_check(p);
  const double h = p.height();
  return {plain.lhs / (2 * lambda),
          -kPi * h * h * h * p.radius() / (24 * lambda * p.slope(p.radius()))};
}

std::vector<SweepRow> steepness_sweep(double radius, double height,
                                      const std::vector<double>& factors) {
  std::vector<SweepRow> rows;
  rows.reserve(factors.size());
  for (const double factor : factors) {
    const RadialProfile p =
        RadialProfile::smooth_disk(radius, height, factor * 2 * height / radius);
    SweepRow row;
    row.factor = factor;
    row.steepness = p.steepness();
    row.integral = weingarten_integral(p);
    row.target = 4 * kPi * radius;
    row.rel_error = std::abs(row.integral - row.target) / row.target;
    row.bounds = weingarten_bounds(p);
    // Allow for the quadrature tolerance on the integral itself.
    const double slack = 1e-6 * row.integral;
    row.bounds_hold = row.bounds.lower <= row.integral + slack &&
                      row.integral <= row.bounds.upper + slack;
    row.fidelity = fidelity_lower_bound_check(p);
    row.tv = tv_integral(p);
    row.tv_target = 2 * kPi * radius * height;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace satv
