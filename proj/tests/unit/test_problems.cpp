#include <doctest.h>

#include <cmath>
#include <random>

#include "satv/problems.hpp"
#include "support/oracles.hpp"

using namespace satv;

TEST_CASE("gaussian kernel") {
  const auto k = gaussian_kernel<double>(7, 2.0);
  CHECK(std::abs(k.taps.sum() - 1) < 1e-12);
  double s = 0;
  for (int x = -3; x <= 3; ++x) s += std::exp(-x * x / 8.0);
  CHECK(k.taps(3, 3) == doctest::Approx(1 / (s * s)).epsilon(1e-12));
  CHECK(k.taps(3, 3) == doctest::Approx(0.0467).epsilon(0.01));
  for (Index a = 0; a < 7; ++a)
    for (Index b = 0; b < 7; ++b) {
      CHECK(k.taps(a, b) == doctest::Approx(k.taps(6 - a, b)));
      CHECK(k.taps(a, b) == doctest::Approx(k.taps(b, a)));
    }
  for (Index size : {1, 3, 9})
    CHECK(std::abs(gaussian_kernel<double>(size, 0.7).taps.sum() - 1) < 1e-12);
  CHECK_THROWS_AS(gaussian_kernel<double>(4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_kernel<double>(5, 0.0), std::invalid_argument);
}

TEST_CASE("average kernel") {
  const auto k = average_kernel<double>(7);
  CHECK((k.taps == 1.0 / 49).all());
  const auto u = ImageGrid<double>::constant(12, 12, 3.5);
  CHECK((apply_blur(u, k).values - 3.5).abs().maxCoeff() < 1e-12);

  ImageGrid<double> impulse = ImageGrid<double>::zeros(12, 10);
  impulse(0, 0) = 1;
  const auto r = apply_blur(impulse, k).values;
  for (Index i = 0; i < 12; ++i)
    for (Index j = 0; j < 10; ++j) {
      const bool inside = (i <= 3 || i >= 9) && (j <= 3 || j >= 7);
      CHECK(r(i, j) == doctest::Approx(inside ? 1.0 / 49 : 0.0));
    }
}

TEST_CASE("identity kernel leaves images unchanged") {
  Array2<double> t = Array2<double>::Zero(3, 3);
  t(1, 1) = 1;
  const auto k = BlurKernel<double>::from_taps(t);
  std::mt19937_64 g(40);
  const auto u = oracle::random_grid(g, 10, 8);
  CHECK((apply_blur(u, k).values - u.values).abs().maxCoeff() < 1e-14);
}

TEST_CASE("spectral blur matches direct circular convolution") {
  std::mt19937_64 g(41);
  const auto u = oracle::random_grid(g, 16, 16, 5.0, 0, 255);
  for (const auto& k : {gaussian_kernel<double>(7, 2.0), average_kernel<double>(5)}) {
    const auto direct = oracle::circular_convolve(u.values, k.taps);
    CHECK((apply_blur(u, k).values - direct).abs().maxCoeff() < 1e-10);
  }
  // Asymmetric taps catch a flipped or shifted embedding.
  const auto asym = BlurKernel<double>::from_taps(oracle::random_array(g, 5, 5, 0, 1));
  CHECK((apply_blur(u, asym).values - oracle::circular_convolve(u.values, asym.taps))
            .abs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("blur conserves the mean and has the conjugate adjoint") {
  std::mt19937_64 g(42);
  const auto k = BlurKernel<double>::from_taps(oracle::random_array(g, 7, 7, 0, 1));
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = oracle::random_grid(g, 20, 13, 5.0, 0, 255);
    const auto v = oracle::random_grid(g, 20, 13, 5.0, 0, 255);
    CHECK(apply_blur(u, k).values.mean() == doctest::Approx(u.values.mean()).epsilon(1e-12));
    const double lhs = inner(apply_blur(u, k), v);
    const double rhs = inner(u, apply_blur_adjoint(v, k));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
  }
}

TEST_CASE("problem validation") {
  const Index m = 8, n = 8;
  CHECK_THROWS_AS(validate_problem<double>(problem::Deblur<double>{gaussian_kernel<double>(9, 2.0)},
                                           m, n),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_problem<double>(problem::Inpaint<double>{Mask::Constant(m, n, true)},
                                           m, n),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_problem<double>(problem::Inpaint<double>{Mask::Constant(4, 4, false)},
                                           m, n),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_problem<double>(
                      problem::Inpaint<double>{Mask::Constant(m, n, false), 0.0}, m, n),
                  std::invalid_argument);
  CHECK_THROWS_AS(BlurKernel<double>::from_taps(Array2<double>::Ones(4, 4)), std::invalid_argument);
}

TEST_CASE("z update closed form") {
  ImageGrid<double> u = ImageGrid<double>::constant(2, 2, 100.0);
  ImageGrid<double> f = ImageGrid<double>::constant(2, 2, 50.0);
  ImageGrid<double> lam3 = ImageGrid<double>::zeros(2, 2);
  Mask missing = Mask::Constant(2, 2, false);
  missing(1, 1) = true;
  const auto z = update_z_inpaint(u, f, missing, 2.0, 0.005, lam3);
  CHECK(z(0, 0) == doctest::Approx(25.5 / 0.505));
  CHECK(z(0, 0) == doctest::Approx(50.495).epsilon(1e-4));
  CHECK(z(1, 1) == 100.0);

  // Penalty dominates as r3 grows.
  const auto zb = update_z_inpaint(u, f, missing, 2.0, 1e9, lam3);
  CHECK(zb(0, 0) == doctest::Approx(100.0).epsilon(1e-6));

  ImageGrid<double> l3 = ImageGrid<double>::constant(2, 2, 1.0);
  update_lam3(l3, u, z, 0.005);
  CHECK(l3(1, 1) == doctest::Approx(1.0));
  CHECK(l3(0, 0) == doctest::Approx(1.0 + 0.005 * (100 - z(0, 0))));
}

TEST_CASE("z update beats sampled candidates") {
  // Pixelwise objective: [known] (z - f)^2 / (2 lambda) + lam3 (u - z) + r3/2 (u - z)^2.
  std::mt19937_64 g(43);
  std::uniform_real_distribution<double> val(-50, 300), mult(-5, 5), pen(0.001, 2);
  std::uniform_real_distribution<double> lam(0.1, 200);
  for (int trial = 0; trial < 20; ++trial) {
    const double u0 = val(g), f0 = val(g), l3 = mult(g), r3 = pen(g), lambda = lam(g);
    for (bool known : {true, false}) {
      Mask missing = Mask::Constant(2, 2, !known);
      missing(0, 1) = known;  // keep one known pixel
      const auto z = update_z_inpaint(ImageGrid<double>::constant(2, 2, u0),
                                      ImageGrid<double>::constant(2, 2, f0), missing, lambda,
                                      r3, ImageGrid<double>::constant(2, 2, l3));
      auto obj = [&](double zz) {
        return (known ? (zz - f0) * (zz - f0) / (2 * lambda) : 0.0) + l3 * (u0 - zz) +
               0.5 * r3 * (u0 - zz) * (u0 - zz);
      };
      const double best = obj(z(0, 0));
      std::uniform_real_distribution<double> cand(z(0, 0) - 100, z(0, 0) + 100);
      bool beaten = false;
      for (int c = 0; c < 100000; ++c) beaten |= obj(cand(g)) < best - 1e-9 * (1 + std::abs(best));
      CHECK_FALSE(beaten);
    }
  }
}
