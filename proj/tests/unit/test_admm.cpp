#include <doctest.h>

#include <cmath>
#include <random>

#include "satv/admm.hpp"
#include "support/oracles.hpp"

using namespace satv;

namespace {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1>;

double prox_objective(const Vec& x, const Vec& a, double b) {
  return b * x.norm() + 0.5 * (x - a).squaredNorm();
}

SolverState<double> flat_state(Index m, Index n, double value = 10.0) {
  return initial_state(ImageGrid<double>::constant(m, n, value));
}

}  // namespace

TEST_CASE("shrinkage closed form") {
  Eigen::Vector2d a(3, 4);
  const Eigen::Vector2d s = shrinkage(a, 2.0);
  CHECK(s(0) == doctest::Approx(1.8));
  CHECK(s(1) == doctest::Approx(2.4));
  CHECK(shrinkage(Eigen::Vector4d::Zero().eval(), 1.0).norm() == 0.0);
  CHECK((shrinkage(a, 0.0) - a).norm() == 0.0);
  CHECK(shrinkage(a, 5.0).norm() == 0.0);
  CHECK(shrinkage(Eigen::Vector4d(1, 1, 1, 1), 0.5).norm() == doctest::Approx(1.5));
}

TEST_CASE("shrinkage beats random candidates") {
  std::mt19937_64 g(51);
  std::normal_distribution<double> nd(0, 3);
  std::uniform_real_distribution<double> bd(0, 6);
  for (int dim : {2, 4}) {
    for (int trial = 0; trial < 50; ++trial) {
      Vec a(dim);
      for (int i = 0; i < dim; ++i) a(i) = nd(g);
      const double b = bd(g);
      const Vec x = shrinkage(a, b);
      const double best = prox_objective(x, a, b);
      bool beaten = false;
      Vec c(dim);
      for (int k = 0; k < 20000; ++k) {
        for (int i = 0; i < dim; ++i) c(i) = a(i) + 2 * nd(g);
        beaten |= prox_objective(c, a, b) < best - 1e-12;
      }
      CHECK_FALSE(beaten);
    }
  }
}

TEST_CASE("shrink_field agrees with pixelwise shrinkage") {
  std::mt19937_64 g(52);
  const auto arg = oracle::random_field<4>(g, 6, 5);
  const Array2<double> thr = oracle::random_array(g, 6, 5, 0, 1.5);
  const auto out = shrink_field(arg, thr);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 5; ++j) {
      Eigen::Vector4d a;
      for (int c = 0; c < 4; ++c) a(c) = arg[c](i, j);
      const Eigen::Vector4d s = shrinkage(a, thr(i, j));
      for (int c = 0; c < 4; ++c) CHECK(out[c](i, j) == doctest::Approx(s(c)).epsilon(1e-14));
    }
}

TEST_CASE("v and w updates") {
  SolverConfig<double> cfg;
  cfg.r1 = 1;
  cfg.r2 = 1;
  auto st = flat_state(4, 4);
  st.weights = {ImageGrid<double>::constant(4, 4, 2.0), ImageGrid<double>::constant(4, 4, 0.5)};

  SUBCASE("flat region with zero multipliers gives zero") {
    CHECK(l1_norm(update_v(st, cfg)) == 0.0);
    CHECK(l1_norm(update_w(st, cfg)) == 0.0);
  }
  SUBCASE("argument magnitude 5 and threshold 2") {
    st.lam1[0](1, 2) = 3;
    st.lam1[1](1, 2) = 4;
    const auto v = update_v(st, cfg);
    CHECK(v[0](1, 2) == doctest::Approx(1.8));
    CHECK(v[1](1, 2) == doctest::Approx(2.4));
    CHECK(v[0](0, 0) == 0.0);
  }
  SUBCASE("4-vector of norm 2 and threshold 0.5") {
    for (int c = 0; c < 4; ++c) st.lam2[c](3, 3) = 1;
    const auto w = update_w(st, cfg);
    double n = 0;
    for (int c = 0; c < 4; ++c) n += w[c](3, 3) * w[c](3, 3);
    CHECK(std::sqrt(n) == doctest::Approx(1.5));
    CHECK(w[0](3, 3) == doctest::Approx(w[3](3, 3)));
  }
  SUBCASE("zero weight passes the proximal average through") {
    std::mt19937_64 g(53);
    st.u = oracle::random_grid(g, 4, 4);
    st.v = oracle::random_field<2>(g, 4, 4);
    st.lam1 = oracle::random_field<2>(g, 4, 4);
    st.weights.alpha.values.setZero();
    cfg.r1 = 2;
    cfg.gamma = 3;
    const auto v = update_v(st, cfg);
    const auto gu = grad(st.u);
    for (int c = 0; c < 2; ++c)
      CHECK((v[c] - (2 * gu[c] + st.lam1[c] + 3 * st.v[c]) / 5).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("disabled orders return the operator") {
    std::mt19937_64 g(54);
    st.u = oracle::random_grid(g, 4, 4);
    cfg.enable_first = false;
    const auto v = update_v(st, cfg), gu = grad(st.u);
    CHECK((v[0] - gu[0]).abs().maxCoeff() == 0.0);
    cfg.enable_first = true;
    cfg.enable_second = false;
    const auto w = update_w(st, cfg), hu = hess(st.u);
    CHECK((w[3] - hu[3]).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("multiplier updates") {
  SolverConfig<double> cfg;
  cfg.r1 = 2;
  auto st = flat_state(5, 5);
  st.v[0].setConstant(-1);  // grad u - v = (1, 0)
  update_multipliers(st, cfg);
  CHECK((st.lam1[0] == 2.0).all());
  CHECK((st.lam1[1] == 0.0).all());
  CHECK(l1_norm(st.lam2) == 0.0);

  auto sat = flat_state(5, 5);
  std::mt19937_64 g(55);
  sat.u = oracle::random_grid(g, 5, 5);
  sat.v = grad(sat.u);
  sat.w = hess(sat.u);
  sat.lam1 = oracle::random_field<2>(g, 5, 5);
  const auto before = sat.lam1;
  update_multipliers(sat, cfg);
  CHECK((sat.lam1[0] == before[0]).all());

  cfg.r1 = 0;
  auto frozen = flat_state(5, 5);
  frozen.v[1].setConstant(3);
  update_multipliers(frozen, cfg);
  CHECK(l1_norm(frozen.lam1) == 0.0);
}

TEST_CASE("diagnostics") {
  SolverConfig<double> cfg;
  const ProblemSpec<double> problem = problem::Denoise{};
  const auto f = ImageGrid<double>::constant(6, 6, 40.0);

  auto st = initial_state(f);
  st.k = 1;
  st.weights = weights_from_image(st.u);
  const auto r = diagnostics(st, cfg, problem, f);
  CHECK(r.R1 == 0.0);
  CHECK(r.R2 == 0.0);
  CHECK(r.E == 0.0);
  CHECK(r.L1_raw);
  CHECK(r.L2_raw);
  CHECK(*r.L1 == 0.0);
  CHECK_FALSE(r.Ru_raw);
  CHECK(*r.Ru == 0.0);

  auto st0 = initial_state(f);
  st0.weights = st.weights;
  const auto r0 = diagnostics(st0, cfg, problem, f);
  CHECK_FALSE(r0.L1.has_value());
  CHECK_FALSE(r0.Ru.has_value());

  // R1 and R2 divide l1 norms over all components by the pixel count.
  st.v[0](0, 0) = 3;
  st.v[1](2, 2) = -6;
  st.w[2](1, 1) = 9;
  const auto r2 = diagnostics(st, cfg, problem, f);
  CHECK(r2.R1 == doctest::Approx(9.0 / 36));
  CHECK(r2.R2 == doctest::Approx(9.0 / 36));

  // A zero previous iterate takes the raw path for Ru.
  auto sz = initial_state(ImageGrid<double>::zeros(6, 6));
  sz.k = 1;
  sz.u.values(0, 0) = 2;
  sz.weights = weights_from_image(sz.u);
  const auto rz = diagnostics(sz, cfg, problem, f);
  CHECK(rz.Ru_raw);
  CHECK(*rz.Ru == 2.0);
}

TEST_CASE("energy matches the loop objective with uniform weights") {
  std::mt19937_64 g(56);
  const double h = 5, lambda = 7;
  const auto u = oracle::random_grid(g, 12, 10, h, 0, 255);
  const auto f = oracle::random_grid(g, 12, 10, h, 0, 255);
  SolverConfig<double> cfg;
  cfg.lambda = lambda;
  const WeightFields<double> w{ImageGrid<double>::constant(12, 10, 3.0, h),
                               ImageGrid<double>::constant(12, 10, 2.0, h)};
  const double e = energy<double>(u, f, w, cfg, problem::Denoise{});
  CHECK(e == doctest::Approx(h * h * oracle::objective(u.values, f.values, 3, 2, lambda, h))
                 .epsilon(1e-12));
  cfg.enable_second = false;
  const double e1 = energy<double>(u, f, w, cfg, problem::Denoise{});
  CHECK(e1 == doctest::Approx(h * h * oracle::objective(u.values, f.values, 3, 0, lambda, h))
                  .epsilon(1e-12));

  Mask missing = Mask::Constant(12, 10, true);
  missing(0, 0) = false;
  const double ei = energy<double>(u, f, w, cfg, problem::Inpaint<double>{missing});
  const double d = u(0, 0) - f(0, 0);
  CHECK(ei == doctest::Approx(e1 - h * h * (((u.values - f.values).square().sum() - d * d) /
                                           (2 * lambda)))
                  .epsilon(1e-10));
}

TEST_CASE("config validation") {
  auto bad = [](auto edit) {
    SolverConfig<double> c;
    edit(c);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  };
  bad([](auto& c) { c.lambda = 0; });
  bad([](auto& c) { c.tol = 0; });
  bad([](auto& c) { c.h = -1; });
  bad([](auto& c) { c.max_iter = 0; });
  bad([](auto& c) { c.r1 = -1; });
  bad([](auto& c) { c.mu = -0.1; });
  bad([](auto& c) { c.enable_first = c.enable_second = false; });
  bad([](auto& c) { c.r1 = 0; });
  bad([](auto& c) { c.r2 = 0; });
  SolverConfig<double> ok;
  ok.r2 = 0;
  ok.enable_second = false;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("constant image is a fixed point reached at k=1") {
  const auto f = ImageGrid<double>::constant(16, 16, 120.0);
  for (double lambda : {1.0, 100.0}) {
    SolverConfig<double> cfg;
    cfg.lambda = lambda;
    const auto res = run<double>(cfg, problem::Denoise{}, f);
    CHECK(res.converged);
    CHECK(res.trace.size() == 1);
    CHECK((res.u.values - 120.0).abs().maxCoeff() < 1e-10);
    CHECK(res.trace[0].R1 < 1e-12);
  }
}

TEST_CASE("tiny lambda keeps u at f") {
  std::mt19937_64 g(57);
  const auto f = oracle::random_grid(g, 32, 32, 5.0, 0, 255);
  SolverConfig<double> cfg;
  cfg.lambda = 1e-6;
  const auto res = run<double>(cfg, problem::Denoise{}, f);
  CHECK(res.converged);
  CHECK((res.u.values - f.values).abs().maxCoeff() / 255 < 1e-3);
}

TEST_CASE("runs are deterministic and multipliers follow the dual ascent history") {
  std::mt19937_64 g(58);
  const auto f = oracle::random_grid(g, 24, 24, 5.0, 0, 255);
  SolverConfig<double> cfg;
  cfg.max_iter = 15;
  RunOptions<double> opt;
  opt.record_timing = false;

  std::vector<SolverState<double>> hist;
  opt.observer = [&](const SolverState<double>& s, const TraceRecord&) { hist.push_back(s); };
  const auto a = run<double>(cfg, problem::Denoise{}, f, opt);
  opt.observer = nullptr;
  const auto b = run<double>(cfg, problem::Denoise{}, f, opt);

  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].R1 == b.trace[k].R1);
    CHECK(a.trace[k].E == b.trace[k].E);
    CHECK(*a.trace[k].Ru == *b.trace[k].Ru);
    CHECK_FALSE(a.trace[k].wall_ms.has_value());
  }
  CHECK((a.u.values == b.u.values).all());

  Vec2Field<double> lam1 = Vec2Field<double>::zeros(24, 24);
  Hess4Field<double> lam2 = Hess4Field<double>::zeros(24, 24);
  for (const auto& s : hist) {
    lam1 += cfg.r1 * (grad(s.u) - s.v);
    lam2 += cfg.r2 * (hess(s.u) - s.w);
    for (int c = 0; c < 2; ++c) CHECK((lam1[c] == s.lam1[c]).all());
    for (int c = 0; c < 4; ++c) CHECK((lam2[c] == s.lam2[c]).all());
  }
}

TEST_CASE("Delta diagnostics") {
  std::mt19937_64 g(59);
  const auto f = oracle::random_grid(g, 20, 20, 5.0, 0, 255);
  SolverConfig<double> cfg;
  cfg.max_iter = 30;

  const auto res = run_with_deltas<double>(cfg, problem::Denoise{}, f);
  REQUIRE(res.deltas.size() == res.trace.size());
  CHECK(res.deltas.back().delta1 == 0.0);
  CHECK(res.deltas.back().delta2 == 0.0);
  for (const auto& d : res.deltas) {
    CHECK(std::abs(d.delta1) <= d.scale1 * (1 + 1e-12));
    CHECK(std::abs(d.delta2) <= d.scale2 * (1 + 1e-12));
  }

  cfg.weights = weight_mode::Constant<double>{3, 2};
  const auto flat = run_with_deltas<double>(cfg, problem::Denoise{}, f);
  for (const auto& d : flat.deltas) {
    CHECK(d.delta1 == 0.0);
    CHECK(d.delta2 == 0.0);
  }
}

TEST_CASE("disabled orders keep their variables on the operator") {
  std::mt19937_64 g(60);
  const auto f = oracle::random_grid(g, 16, 16, 5.0, 0, 255);
  SolverConfig<double> cfg;
  cfg.enable_second = false;
  cfg.r2 = 0;
  cfg.max_iter = 20;
  const auto res = run<double>(cfg, problem::Denoise{}, f);
  CHECK(l1_norm(res.final_state.lam2) == 0.0);
  for (const auto& r : res.trace) CHECK(r.R2 < 1e-12);

  cfg = SolverConfig<double>{};
  cfg.enable_first = false;
  cfg.max_iter = 20;
  const auto res2 = run<double>(cfg, problem::Denoise{}, f);
  CHECK(l1_norm(res2.final_state.lam1) == 0.0);
  for (const auto& r : res2.trace) CHECK(r.R1 < 1e-12);
}

TEST_CASE("proximal terms keep the same limit") {
  std::mt19937_64 g(61);
  const auto f = oracle::random_grid(g, 16, 16, 5.0, 0, 255);
  SolverConfig<double> cfg;
  cfg.weights = weight_mode::Constant<double>{2, 1};
  cfg.lambda = 10;
  cfg.tol = 1e-9;
  cfg.max_iter = 5000;
  const auto plain = run<double>(cfg, problem::Denoise{}, f);
  cfg.mu = 0.05;
  cfg.gamma = 0.5;
  cfg.tau = 0.5;
  const auto prox = run<double>(cfg, problem::Denoise{}, f);
  CHECK(plain.converged);
  CHECK(prox.converged);
  CHECK((plain.u.values - prox.u.values).abs().maxCoeff() < 0.05);
}

TEST_CASE("non-finite iterates abort") {
  Array2<double> big(8, 8);
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 8; ++j) big(i, j) = ((i + j) % 2 ? 1 : -1) * 1e308;
  SolverConfig<double> cfg;
  CHECK_THROWS_AS(run<double>(cfg, problem::Denoise{}, ImageGrid<double>(big)), SolverAbort);
}

TEST_CASE("run rejects inconsistent inputs") {
  const auto f = ImageGrid<double>::constant(8, 8, 1.0);
  SolverConfig<double> cfg;
  const auto other = ImageGrid<double>::constant(4, 4, 1.0);
  RunOptions<double> opt;
  opt.reference = &other;
  CHECK_THROWS_AS(run<double>(cfg, problem::Denoise{}, f, opt), std::invalid_argument);
  CHECK_THROWS_AS(run<double>(cfg, problem::Inpaint<double>{Mask::Constant(8, 8, true)}, f),
                  std::invalid_argument);
}

TEST_CASE("inpainting ignores the data on the missing set") {
  std::mt19937_64 g(62);
  const auto f = oracle::random_grid(g, 24, 24, 5.0, 0, 255);
  Mask missing(24, 24);
  std::bernoulli_distribution coin(0.3);
  for (Index k = 0; k < missing.size(); ++k) missing.data()[k] = coin(g);
  ImageGrid<double> f2 = f;
  f2.values = missing.select(Array2<double>::Constant(24, 24, 9999.0), f.values);
  SolverConfig<double> cfg;
  cfg.max_iter = 25;
  const problem::Inpaint<double> p{missing, 0.005};
  const auto a = run<double>(cfg, p, f);
  const auto b = run<double>(cfg, p, f2);
  CHECK((a.u.values == b.u.values).all());

  cfg.weights = weight_mode::Observed{};
  CHECK((run<double>(cfg, p, f).u.values == run<double>(cfg, p, f2).u.values).all());
}

TEST_CASE("reference metrics are recorded") {
  std::mt19937_64 g(63);
  const auto clean = ImageGrid<double>::constant(16, 16, 100.0);
  ImageGrid<double> f = clean;
  f.values += oracle::random_array(g, 16, 16, -10, 10);
  SolverConfig<double> cfg;
  RunOptions<double> opt;
  opt.reference = &clean;
  const auto res = run<double>(cfg, problem::Denoise{}, f, opt);
  for (const auto& r : res.trace) {
    CHECK(r.psnr.has_value());
    CHECK(r.ssim.has_value());
    CHECK(r.wall_ms.has_value());
  }
  CHECK(*res.trace.back().psnr > psnr(clean, f));
}
