// ADMM for the spatially adapted first and second order model
//
//   min_u  sum alpha(u)|grad u| + sum beta(u)|hess u| + 1/(2 lambda) |A u - f|^2
//
// split as v = grad u, w = hess u (and z = u for inpainting). Each sweep solves
// the u-subproblem spectrally, refreshes the weights from the new iterate,
// shrinks v and w, and takes a dual-ascent step on the multipliers.
#ifndef SATV_ADMM_HPP_
#define SATV_ADMM_HPP_

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "satv/grid.hpp"
#include "satv/metrics.hpp"
#include "satv/problems.hpp"
#include "satv/spectral.hpp"
#include "satv/weights.hpp"

namespace satv {

/// Raised when an iterate becomes non-finite.
class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct SolverConfig {
  Scalar lambda = 100;
  Scalar r1 = 1;
  Scalar r2 = 2;
  Scalar mu = 0;
  Scalar gamma = 0;
  Scalar tau = 0;
  Scalar h = 5;
  int max_iter = 300;
  Scalar tol = Scalar(2e-3);
  WeightMode<Scalar> weights = weight_mode::Dynamic{};
  bool enable_first = true;
  bool enable_second = true;

  void validate() const {
    auto bad = [](const std::string& m) { throw std::invalid_argument(m); };
    if (!(lambda > 0)) bad("lambda must be positive");
    if (!(tol > 0)) bad("tol must be positive");
    if (!(h > 0)) bad("mesh size h must be positive");
    if (max_iter < 1) bad("max_iter must be at least 1");
    if (r1 < 0 || r2 < 0) bad("r1 and r2 must be nonnegative");
    if (mu < 0 || gamma < 0 || tau < 0) bad("mu, gamma and tau must be nonnegative");
    if (!enable_first && !enable_second)
      bad("at least one of the first and second order terms must be enabled");
    if (enable_first && !(r1 + gamma > 0)) bad("r1 + gamma must be positive");
    if (enable_second && !(r2 + tau > 0)) bad("r2 + tau must be positive");
  }

  /// Penalties as seen by the u-subproblem; a disabled term drops out.
  Scalar r1_eff() const { return enable_first ? r1 : Scalar(0); }
  Scalar r2_eff() const { return enable_second ? r2 : Scalar(0); }
};

template <typename Scalar>
struct SolverState {
  int k = 0;
  ImageGrid<Scalar> u, u_prev;
  Vec2Field<Scalar> v, lam1, lam1_prev;
  Hess4Field<Scalar> w, lam2, lam2_prev;
  // Inpainting splitting z = u; unused otherwise.
  ImageGrid<Scalar> z, lam3;
  WeightFields<Scalar> weights;
};

/// One row of the convergence trace. Optional entries are undefined at the
/// given iteration (or not requested).
struct TraceRecord {
  int k = 0;
  double R1 = 0, R2 = 0;
  std::optional<double> L1, L2, Ru;
  // Set when the corresponding denominator norm was zero; the raw numerator
  // is reported instead of the ratio.
  bool L1_raw = false, L2_raw = false, Ru_raw = false;
  double E = 0;
  std::optional<double> delta1, delta2;
  std::optional<double> psnr, ssim;
  std::optional<double> wall_ms;
};

// ---------------------------------------------------------------------------
// Proximal map of b|.|: vectorial soft thresholding.

/// shrinkage(a, b) = max(|a| - b, 0) a / |a|, with 0 for a = 0.
template <typename Derived>
typename Derived::PlainObject shrinkage(const Eigen::MatrixBase<Derived>& a,
                                        typename Derived::Scalar b) {
  using S = typename Derived::Scalar;
  const S n = a.norm();
  if (n <= b || n == S(0)) return Derived::PlainObject::Zero(a.rows(), a.cols());
  return ((n - b) / n) * a;
}

/// Pixelwise shrinkage of a K-vector field with a spatially varying threshold.
template <typename Scalar, int K>
Field<Scalar, K> shrink_field(Field<Scalar, K> arg, const Array2<Scalar>& threshold) {
  const Array2<Scalar> mag = arg.magnitude();
  // factor = max(|a| - b, 0) / |a|, zero where |a| == 0.
  const Array2<Scalar> factor =
      (mag > threshold && mag > Scalar(0))
          .select((mag - threshold) / mag.max(std::numeric_limits<Scalar>::min()),
                  Scalar(0));
  for (int k = 0; k < K; ++k) arg[k] *= factor;
  return arg;
}

// ---------------------------------------------------------------------------
// u-subproblem.

/// Fixed data of the u-subproblem for one (config, problem, f) triple.
template <typename Scalar>
struct USolver {
  SpectralDenominator<Scalar> denominator;
  // Constant part of the right-hand side: f/lambda or K*f/lambda. Empty for
  // inpainting, where the fidelity enters through r3 z - lam3.
  std::optional<ImageGrid<Scalar>> fidelity_rhs;
  std::optional<ComplexArray2<Scalar>> kernel_hat;
  Fft2<Scalar> fft;
};

/// Builds the denominator (Z + mu) + r1 S + r2 S^2 with Z = 1/lambda,
/// |K^|^2/lambda or r3.
template <typename Scalar>
SpectralDenominator<Scalar> build_denominator(const SolverConfig<Scalar>& cfg,
                                              const ProblemSpec<Scalar>& problem,
                                              Index rows, Index cols) {
  Array2<Scalar> zero;
  if (std::holds_alternative<problem::Denoise>(problem)) {
    zero = Array2<Scalar>::Constant(rows, cols, Scalar(1) / cfg.lambda + cfg.mu);
  } else if (const auto* d = std::get_if<problem::Deblur<Scalar>>(&problem)) {
    zero = kernel_spectrum(d->kernel, rows, cols).abs2() / cfg.lambda + cfg.mu;
  } else {
    const auto& in = std::get<problem::Inpaint<Scalar>>(problem);
    zero = Array2<Scalar>::Constant(rows, cols, in.r3 + cfg.mu);
  }
  return make_denominator(std::move(zero), cfg.r1_eff(), cfg.r2_eff(), cfg.h);
}

template <typename Scalar>
USolver<Scalar> make_u_solver(const SolverConfig<Scalar>& cfg,
                              const ProblemSpec<Scalar>& problem,
                              const ImageGrid<Scalar>& f) {
  USolver<Scalar> s;
  s.denominator = build_denominator(cfg, problem, f.rows(), f.cols());
  if (std::holds_alternative<problem::Denoise>(problem)) {
    s.fidelity_rhs.emplace();
    s.fidelity_rhs->h = f.h;
    s.fidelity_rhs->values = f.values / cfg.lambda;
  } else if (const auto* d = std::get_if<problem::Deblur<Scalar>>(&problem)) {
    s.kernel_hat = kernel_spectrum(d->kernel, f.rows(), f.cols());
    ComplexArray2<Scalar> z = s.fft.forward(f.values);
    z *= s.kernel_hat->conjugate();
    s.fidelity_rhs.emplace();
    s.fidelity_rhs->h = f.h;
    s.fidelity_rhs->values = s.fft.inverse_real(std::move(z)) / cfg.lambda;
  }
  return s;
}

/// Right-hand side of the u normal equation for the current state.
template <typename Scalar>
ImageGrid<Scalar> u_rhs(const SolverState<Scalar>& st, const SolverConfig<Scalar>& cfg,
                        const ProblemSpec<Scalar>& problem, const USolver<Scalar>& us) {
  ImageGrid<Scalar> rhs;
  rhs.h = st.u.h;
  if (us.fidelity_rhs) {
    rhs.values = us.fidelity_rhs->values;
  } else {
    const auto& in = std::get<problem::Inpaint<Scalar>>(problem);
    rhs.values = in.r3 * st.z.values - st.lam3.values;
  }
  if (cfg.enable_first) {
    // - div(r1 v - lam1)
    rhs.values -= div(Vec2Field<Scalar>(cfg.r1 * st.v - st.lam1)).values;
  }
  if (cfg.enable_second) {
    // + div2(r2 w - lam2)
    rhs.values += div2(Hess4Field<Scalar>(cfg.r2 * st.w - st.lam2)).values;
  }
  if (cfg.mu > 0) rhs.values += cfg.mu * st.u.values;
  return rhs;
}

template <typename Scalar>
ImageGrid<Scalar> update_u(const SolverState<Scalar>& st, const SolverConfig<Scalar>& cfg,
                           const ProblemSpec<Scalar>& problem, USolver<Scalar>& us) {
  return spectral_solve(u_rhs(st, cfg, problem, us), us.denominator, us.fft);
}

/// Physical-space operator of the u normal equation:
/// Z u - r1 div grad u + r2 div2 hess u.
template <typename Scalar>
ImageGrid<Scalar> apply_u_operator(const ImageGrid<Scalar>& u,
                                   const SolverConfig<Scalar>& cfg,
                                   const ProblemSpec<Scalar>& problem) {
  ImageGrid<Scalar> out;
  out.h = u.h;
  if (std::holds_alternative<problem::Denoise>(problem)) {
    out.values = (Scalar(1) / cfg.lambda + cfg.mu) * u.values;
  } else if (const auto* d = std::get_if<problem::Deblur<Scalar>>(&problem)) {
    out.values = apply_blur_adjoint(apply_blur(u, d->kernel), d->kernel).values / cfg.lambda +
                 cfg.mu * u.values;
  } else {
    const auto& in = std::get<problem::Inpaint<Scalar>>(problem);
    out.values = (in.r3 + cfg.mu) * u.values;
  }
  out.values -= cfg.r1_eff() * div(grad(u)).values;
  out.values += cfg.r2_eff() * div2(hess(u)).values;
  return out;
}

// ---------------------------------------------------------------------------
// v, w and multiplier steps. st.u and st.weights must already hold the new
// iterate and its weights.

template <typename Scalar>
Vec2Field<Scalar> update_v(const SolverState<Scalar>& st, const SolverConfig<Scalar>& cfg) {
  Vec2Field<Scalar> gu = grad(st.u);
  if (!cfg.enable_first) return gu;
  const Scalar denom = cfg.r1 + cfg.gamma;
  Vec2Field<Scalar> arg = cfg.r1 * gu + st.lam1;
  if (cfg.gamma > 0) arg += cfg.gamma * st.v;
  arg *= Scalar(1) / denom;
  return shrink_field(std::move(arg), Array2<Scalar>(st.weights.alpha.values / denom));
}

template <typename Scalar>
Hess4Field<Scalar> update_w(const SolverState<Scalar>& st, const SolverConfig<Scalar>& cfg) {
  Hess4Field<Scalar> hu = hess(st.u);
  if (!cfg.enable_second) return hu;
  const Scalar denom = cfg.r2 + cfg.tau;
  Hess4Field<Scalar> arg = cfg.r2 * hu + st.lam2;
  if (cfg.tau > 0) arg += cfg.tau * st.w;
  arg *= Scalar(1) / denom;
  return shrink_field(std::move(arg), Array2<Scalar>(st.weights.beta.values / denom));
}

/// lam1 += r1 (grad u - v), lam2 += r2 (hess u - w). Disabled terms stay at 0.
template <typename Scalar>
void update_multipliers(SolverState<Scalar>& st, const SolverConfig<Scalar>& cfg) {
  if (cfg.enable_first) st.lam1 += cfg.r1 * (grad(st.u) - st.v);
  if (cfg.enable_second) st.lam2 += cfg.r2 * (hess(st.u) - st.w);
}

// ---------------------------------------------------------------------------
// Diagnostics.

namespace detail {
/// ratio = num / den, or num itself (flagged) when den == 0.
inline double guarded_ratio(double num, double den, bool& raw) {
  raw = !(den > 0);
  return raw ? num : num / den;
}
}  // namespace detail

/// Discrete objective with integrals as h^2-weighted pixel sums. Terms of a
/// disabled order are omitted.
template <typename Scalar>
Scalar energy(const ImageGrid<Scalar>& u, const ImageGrid<Scalar>& f,
              const WeightFields<Scalar>& weights, const SolverConfig<Scalar>& cfg,
              const ProblemSpec<Scalar>& problem) {
  Scalar reg(0);
  if (cfg.enable_first) reg += (weights.alpha.values * grad(u).magnitude()).sum();
  if (cfg.enable_second) reg += (weights.beta.values * hess(u).magnitude()).sum();
  Array2<Scalar> resid;
  if (const auto* d = std::get_if<problem::Deblur<Scalar>>(&problem)) {
    resid = apply_blur(u, d->kernel).values - f.values;
  } else {
    resid = u.values - f.values;
    if (const auto* in = std::get_if<problem::Inpaint<Scalar>>(&problem))
      resid = in->missing.select(Array2<Scalar>::Zero(u.rows(), u.cols()), resid);
  }
  const Scalar fid = resid.square().sum() / (Scalar(2) * cfg.lambda);
  return u.h * u.h * (reg + fid);
}

/// Fills R1, R2, L1, L2, Ru and E for the state after sweep st.k (k >= 1).
template <typename Scalar>
TraceRecord diagnostics(const SolverState<Scalar>& st, const SolverConfig<Scalar>& cfg,
                        const ProblemSpec<Scalar>& problem, const ImageGrid<Scalar>& f,
                        const ImageGrid<Scalar>* reference = nullptr) {
  TraceRecord r;
  r.k = st.k;
  const double area = static_cast<double>(st.u.size());
  r.R1 = static_cast<double>(l1_norm(Vec2Field<Scalar>(st.v - grad(st.u)))) / area;
  r.R2 = static_cast<double>(l1_norm(Hess4Field<Scalar>(st.w - hess(st.u)))) / area;
  if (st.k >= 1) {
    r.L1 = detail::guarded_ratio(l1_norm(Vec2Field<Scalar>(st.lam1 - st.lam1_prev)),
                                 l1_norm(st.lam1_prev), r.L1_raw);
    r.L2 = detail::guarded_ratio(l1_norm(Hess4Field<Scalar>(st.lam2 - st.lam2_prev)),
                                 l1_norm(st.lam2_prev), r.L2_raw);
    r.Ru = detail::guarded_ratio((st.u.values - st.u_prev.values).abs().sum(),
                                 l1_norm(st.u_prev), r.Ru_raw);
  }
  r.E = static_cast<double>(energy(st.u, f, st.weights, cfg, problem));
  if (reference) {
    r.psnr = psnr(*reference, st.u);
    if (std::min(f.rows(), f.cols()) >= kSsimWindow) r.ssim = ssim(*reference, st.u);
  }
  return r;
}

/// Reference point for the Delta diagnostics (the final iterate of a run).
template <typename Scalar>
struct SaddleProxy {
  Vec2Field<Scalar> v;
  Hess4Field<Scalar> w;
  WeightFields<Scalar> weights;
};

struct DeltaPair {
  double delta1 = 0, delta2 = 0;
  // Upper bounds on |delta|: sum |alpha^k - alpha_bar| |v^k - v_bar| etc.
  double scale1 = 0, scale2 = 0;
};

/// Delta1 = <(alpha(u^k) - alpha(u_bar)) s^k, v^k - v_bar> with s^k = v^k/|v^k|
/// (0 where v^k = 0); Delta2 likewise with w and beta.
template <typename Scalar>
DeltaPair delta_pair(const SolverState<Scalar>& st, const SaddleProxy<Scalar>& bar) {
  DeltaPair d;
  auto one = [](const auto& x, const auto& xbar, const Array2<Scalar>& wk,
                const Array2<Scalar>& wbar, double& delta, double& scale) {
    using F = std::decay_t<decltype(x)>;
    const Array2<Scalar> mag = x.magnitude();
    const Array2<Scalar> inv =
        (mag > Scalar(0)).select(mag.max(std::numeric_limits<Scalar>::min()).inverse(),
                                 Scalar(0));
    const F diff = x - xbar;
    Array2<Scalar> dot = Array2<Scalar>::Zero(mag.rows(), mag.cols());
    for (int k = 0; k < F::kComponents; ++k) dot += x[k] * diff[k];
    const Array2<Scalar> dw = wk - wbar;
    delta = static_cast<double>((dw * inv * dot).sum());
    scale = static_cast<double>((dw.abs() * diff.magnitude()).sum());
  };
  one(st.v, bar.v, st.weights.alpha.values, bar.weights.alpha.values, d.delta1, d.scale1);
  one(st.w, bar.w, st.weights.beta.values, bar.weights.beta.values, d.delta2, d.scale2);
  return d;
}

// ---------------------------------------------------------------------------
// Driver.

template <typename Scalar>
struct RunOptions {
  const ImageGrid<Scalar>* reference = nullptr;
  const SaddleProxy<Scalar>* proxy = nullptr;
  bool record_timing = true;
  // Called after each sweep with the state and its trace row.
  std::function<void(const SolverState<Scalar>&, const TraceRecord&)> observer;
};

template <typename Scalar>
struct RunResult {
  ImageGrid<Scalar> u;
  std::vector<TraceRecord> trace;
  std::vector<DeltaPair> deltas;
  SolverState<Scalar> final_state;
  bool converged = false;
};

template <typename Scalar>
SolverState<Scalar> initial_state(const ImageGrid<Scalar>& f) {
  const Index m = f.rows(), n = f.cols();
  SolverState<Scalar> st;
  st.u = f;
  st.u_prev = f;
  st.v = Vec2Field<Scalar>::zeros(m, n, f.h);
  st.lam1 = st.lam1_prev = st.v;
  st.w = Hess4Field<Scalar>::zeros(m, n, f.h);
  st.lam2 = st.lam2_prev = st.w;
  st.z = f;
  st.lam3 = ImageGrid<Scalar>::zeros(m, n, f.h);
  return st;
}

namespace detail {
template <typename Scalar>
void check_finite(const SolverState<Scalar>& st) {
  auto fail = [&](const char* what) {
    throw SolverAbort(std::string("non-finite ") + what + " at iterate k=" +
                      std::to_string(st.k));
  };
  if (!st.u.values.allFinite()) fail("u");
  if (!st.v.all_finite()) fail("v");
  if (!st.w.all_finite()) fail("w");
  if (!st.lam1.all_finite()) fail("lambda1");
  if (!st.lam2.all_finite()) fail("lambda2");
  if (!st.z.values.allFinite() || !st.lam3.values.allFinite()) fail("z");
}

/// Inpainting ignores f on D; replace those values by the mean of the known
/// pixels so nothing downstream (initial iterate, observed weights) sees them.
template <typename Scalar>
ImageGrid<Scalar> neutralize_missing(const ImageGrid<Scalar>& f,
                                     const ProblemSpec<Scalar>& problem) {
  const auto* in = std::get_if<problem::Inpaint<Scalar>>(&problem);
  if (!in) return f;
  const Array2<Scalar> zero = Array2<Scalar>::Zero(f.rows(), f.cols());
  const Scalar known = Scalar((!in->missing).count());
  const Scalar mean = in->missing.select(zero, f.values).sum() / known;
  ImageGrid<Scalar> g = f;
  g.values = in->missing.select(Array2<Scalar>::Constant(f.rows(), f.cols(), mean), f.values);
  return g;
}
}  // namespace detail

/// Runs the iteration u -> weights -> v -> w -> [z] -> multipliers -> check
/// until Ru <= tol or max_iter sweeps.
template <typename Scalar>
RunResult<Scalar> run(const SolverConfig<Scalar>& cfg, const ProblemSpec<Scalar>& problem,
                      const ImageGrid<Scalar>& f_in, const RunOptions<Scalar>& opt = {}) {
  cfg.validate();
  validate_problem(problem, f_in.rows(), f_in.cols());
  ImageGrid<Scalar> f = detail::neutralize_missing(f_in, problem);
  f.h = cfg.h;
  if (opt.reference && !opt.reference->same_shape(f))
    throw std::invalid_argument("reference image shape does not match the input");

  USolver<Scalar> us = make_u_solver(cfg, problem, f);
  const WeightUpdater<Scalar> weights(cfg.weights, f);
  const auto* inpaint = std::get_if<problem::Inpaint<Scalar>>(&problem);

  RunResult<Scalar> res;
  SolverState<Scalar> st = initial_state(f);
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();

  while (st.k < cfg.max_iter) {
    st.u_prev = st.u;
    st.lam1_prev = st.lam1;
    st.lam2_prev = st.lam2;

    st.u = update_u(st, cfg, problem, us);
    st.weights = weights.update(st.u);
    st.v = update_v(st, cfg);
    st.w = update_w(st, cfg);
    if (inpaint) {
      st.z = update_z_inpaint(st.u, f, inpaint->missing, cfg.lambda, inpaint->r3, st.lam3);
      update_lam3(st.lam3, st.u, st.z, inpaint->r3);
    }
    update_multipliers(st, cfg);
    ++st.k;
    detail::check_finite(st);

    TraceRecord rec = diagnostics(st, cfg, problem, f, opt.reference);
    if (opt.proxy) {
      const DeltaPair d = delta_pair(st, *opt.proxy);
      rec.delta1 = d.delta1;
      rec.delta2 = d.delta2;
      res.deltas.push_back(d);
    }
    if (opt.record_timing)
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (opt.observer) opt.observer(st, rec);
    res.trace.push_back(rec);

    if (rec.Ru && *rec.Ru <= static_cast<double>(cfg.tol)) {
      res.converged = true;
      break;
    }
  }
  res.u = st.u;
  res.final_state = std::move(st);
  return res;
}

template <typename Scalar>
SaddleProxy<Scalar> proxy_from(const SolverState<Scalar>& st) {
  return {st.v, st.w, st.weights};
}

/// Runs twice: the first pass supplies the final iterate as saddle proxy, the
/// second (bit-identical) pass records Delta1/Delta2 against it.
template <typename Scalar>
RunResult<Scalar> run_with_deltas(const SolverConfig<Scalar>& cfg,
                                  const ProblemSpec<Scalar>& problem,
                                  const ImageGrid<Scalar>& f, RunOptions<Scalar> opt = {}) {
  RunOptions<Scalar> plain;
  plain.reference = opt.reference;
  const RunResult<Scalar> first = run(cfg, problem, f, plain);
  const SaddleProxy<Scalar> bar = proxy_from(first.final_state);
  opt.proxy = &bar;
  return run(cfg, problem, f, opt);
}

}  // namespace satv

#endif  // SATV_ADMM_HPP_
