#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "habitat/convolution.hpp"
#include "habitat/field.hpp"
#include "habitat/kernel.hpp"

using namespace habitat;

namespace {

// Independent quadrature oracle for kernel integrals (test-side only).
double quad(const std::function<double(double)>& f, double a, double b) {
  return detail::adaptive_simpson(f, a, b, 1e-13);
}

// Closed-form exponential moment of the cosine-squared bump, derived from
// cos^2 = (1 + cos)/2 and the standard e^{mu z} cos(b z) antiderivative.
double bump_mgf_closed_form(double mu, double R) {
  if (mu == 0.0) return 1.0;
  const double b = std::numbers::pi / R;
  return std::sinh(mu * R) / R * (1.0 / mu - mu / (mu * mu + b * b));
}

}  // namespace

TEST_CASE("gaussian kernel evaluation and certificate") {
  const Kernel k = Kernel::gaussian(1.0);
  CHECK(k(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(k(0.0) > 0.0);
  for (double z : {0.3, 1.7, 4.2, 7.9}) {
    CHECK(k(z) == doctest::Approx(k(-z)).epsilon(1e-15));
  }
  CHECK(k(k.support_radius * 1.01) == 0.0);
  // exponential tail bound beyond the stored certificate radius
  for (double z = k.tail_M + 1e-6; z < k.tail_M + 25.0; z += 0.37) {
    CHECK(kernel_eval(k, z) < std::exp(-k.tail_mu * z));
  }
  // mass over the support window
  const double mass = quad([&](double z) { return kernel_eval(k, z); },
                           -k.support_radius, k.support_radius);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("small-sigma gaussian certificate is still valid") {
  const Kernel k = Kernel::gaussian(0.2);
  for (double z = k.tail_M + 1e-6; z < k.tail_M + 10.0; z += 0.11) {
    CHECK(kernel_eval(k, z) < std::exp(-k.tail_mu * z));
  }
}

TEST_CASE("compact bump kernel evaluation") {
  const Kernel k = Kernel::compact_bump(1.0);
  CHECK(k(1.0) == 0.0);
  CHECK(k(-1.0) == 0.0);
  CHECK(k(1.5) == 0.0);
  CHECK(k(0.0) == doctest::Approx(1.0).epsilon(1e-12));  // 1/R at the center
  CHECK(k(0.4) == doctest::Approx(k(-0.4)).epsilon(1e-15));
  const double mass = quad([&](double z) { return kernel_eval(k, z); }, -1.0, 1.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("moment generating function") {
  const Kernel g = Kernel::gaussian(1.0);
  CHECK(moment_generating(g, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(moment_generating(g, 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  // closed form vs quadrature oracle
  for (double mu : {0.35, 1.2, 2.4}) {
    const double oracle = quad(
        [&](double z) { return std::exp(mu * z) * kernel_eval(g, z); },
        -g.support_radius, g.support_radius);
    CHECK(moment_generating(g, mu) == doctest::Approx(oracle).epsilon(5e-9));
    CHECK(moment_generating(g, mu) ==
          doctest::Approx(moment_generating(g, -mu)).epsilon(1e-13));
  }

  const Kernel b = Kernel::compact_bump(1.3);
  CHECK(moment_generating(b, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double mu : {0.5, 1.0, 3.0}) {
    CHECK(moment_generating(b, mu) ==
          doctest::Approx(bump_mgf_closed_form(mu, 1.3)).epsilon(1e-12));
    CHECK(moment_generating(b, mu) ==
          doctest::Approx(moment_generating(b, -mu)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(moment_generating(g, 60.0), std::invalid_argument);
  CHECK_THROWS_AS(moment_generating(g, 40.0), std::overflow_error);
}

TEST_CASE("window mass closed forms agree with quadrature") {
  const Kernel g = Kernel::gaussian(0.8);
  const Kernel b = Kernel::compact_bump(1.1);
  for (double a : {0.5, 1.0, 2.5}) {
    CHECK(kernel_window_mass(g, a) ==
          doctest::Approx(quad([&](double z) { return kernel_eval(g, z); }, -a, a))
              .epsilon(1e-11));
    CHECK(kernel_window_mass(b, a) ==
          doctest::Approx(quad([&](double z) { return kernel_eval(b, z); }, -a, a))
              .epsilon(1e-11));
  }
  CHECK(kernel_window_mass(b, 1.1) == doctest::Approx(1.0).epsilon(1e-15));
}

namespace {
struct ConvFixture {
  Grid grid = Grid::make(30.0, 512);
  Kernel kernel = Kernel::gaussian(1.0);
  ConvolutionOperator op = ConvolutionOperator::build(kernel, grid.dx, grid.n);
};
}  // namespace

TEST_CASE("convolution: zero and constant fields") {
  ConvFixture fx;
  Field zero = Field::constant(fx.grid, 0.0);
  Field out = fx.op.convolve(zero);
  CHECK(out.max_abs() == 0.0);

  Field ones = Field::constant(fx.grid, 1.0);
  out = fx.op.convolve(ones);
  const int w = fx.op.window();
  for (int i = w; i < fx.grid.n - w; ++i) {
    CHECK(out.values[static_cast<std::size_t>(i)] == doctest::Approx(1.0).epsilon(1e-10));
  }
  // row sums never exceed the full mass
  for (double v : out.values) CHECK(v <= 1.0 + 1e-12);
}

TEST_CASE("convolution: delta response matches direct summation oracle") {
  ConvFixture fx;
  Field delta = Field::constant(fx.grid, 0.0);
  const int center = fx.grid.n / 2;
  delta.values[static_cast<std::size_t>(center)] = 1.0 / fx.grid.dx;
  const Field out = fx.op.convolve(delta);
  // brute-force oracle written against the weight table definition
  const auto weights = fx.op.weights();
  const int w = fx.op.window();
  for (int i = 0; i < fx.grid.n; ++i) {
    double expect = 0.0;
    const int j = center - i;  // offset hitting the delta
    if (j >= -w && j <= w) {
      expect = weights[static_cast<std::size_t>(j + w)] / fx.grid.dx;
    }
    CHECK(out.values[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("convolution properties: positivity, linearity, translation") {
  ConvFixture fx;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Field u = Field::constant(fx.grid, 0.0);
  Field v = Field::constant(fx.grid, 0.0);
  for (int i = 0; i < fx.grid.n; ++i) {
    u.values[static_cast<std::size_t>(i)] = unit(rng);
    v.values[static_cast<std::size_t>(i)] = unit(rng);
  }
  const Field ku = fx.op.convolve(u);
  for (double x : ku.values) CHECK(x >= 0.0);

  // linearity
  Field combo = Field::constant(fx.grid, 0.0);
  for (std::size_t i = 0; i < combo.size(); ++i) {
    combo.values[i] = 2.5 * u.values[i] - 0.75 * v.values[i];
  }
  const Field kc = fx.op.convolve(combo);
  const Field kv = fx.op.convolve(v);
  for (std::size_t i = 0; i < combo.size(); ++i) {
    CHECK(kc.values[i] ==
          doctest::Approx(2.5 * ku.values[i] - 0.75 * kv.values[i]).epsilon(1e-12));
  }

  // translation equivariance in the interior
  const int shift = 7;
  Field shifted = Field::constant(fx.grid, 0.0);
  for (int i = shift; i < fx.grid.n; ++i) {
    shifted.values[static_cast<std::size_t>(i)] =
        u.values[static_cast<std::size_t>(i - shift)];
  }
  const Field ks = fx.op.convolve(shifted);
  const int w = fx.op.window();
  for (int i = w + shift; i < fx.grid.n - w; ++i) {
    CHECK(ks.values[static_cast<std::size_t>(i)] ==
          doctest::Approx(ku.values[static_cast<std::size_t>(i - shift)])
              .epsilon(1e-11));
  }
}

TEST_CASE("convolution: dense and fft paths agree on random fields") {
  ConvFixture fx;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> in(static_cast<std::size_t>(fx.grid.n));
  std::vector<double> dense(in.size()), fast(in.size());
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    for (double& x : in) x = noise(rng);
    fx.op.apply_dense(in, dense);
    fx.op.apply_fft(in, fast);
    for (std::size_t i = 0; i < in.size(); ++i) {
      worst = std::max(worst, std::abs(dense[i] - fast[i]));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("periodic convolution wraps exactly") {
  const Kernel k = Kernel::gaussian(0.6);
  const PeriodicConvolution op = PeriodicConvolution::build(k, 24.0, 400);
  std::vector<double> ones(400, 1.0), out(400);
  op.apply(ones, out);
  for (double v : out) CHECK(v == doctest::Approx(op.window_mass()).epsilon(1e-13));
  CHECK_THROWS_AS(PeriodicConvolution::build(k, 2.0, 100), std::invalid_argument);
}
