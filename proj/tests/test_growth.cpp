#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "habitat/growth.hpp"
#include "habitat/kernel.hpp"

using namespace habitat;

namespace {
GrowthModel reference_model() {
  GrowthModel m;
  m.r = 1.0;
  m.q = 1.0;
  m.L = 5.0;
  m.L0 = 1.0;
  return m;
}
}  // namespace

TEST_CASE("growth evaluation on each piece") {
  const GrowthModel m = reference_model();
  CHECK(m.eval(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.eval(4.99, 0.3) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(m.eval(10.0, 0.0) == -1.0);
  CHECK(m.eval(10.0, 0.7) == -1.0);
  CHECK(m.eval(-6.0, 0.2) == -1.0);
  // midpoint of the cosine blend: -q + (r(1-u)+q)/2 * (1 + cos(pi/2))
  CHECK(m.eval(5.5, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("growth linearization f(x, 0)") {
  const GrowthModel m = reference_model();
  CHECK(growth_linearized(m, 0.0) == doctest::Approx(m.r).epsilon(1e-15));
  CHECK(growth_linearized(m, m.L + m.L0) == doctest::Approx(-m.q).epsilon(1e-12));
  CHECK(growth_linearized(m, -(m.L + m.L0)) == doctest::Approx(-m.q).epsilon(1e-12));
  CHECK(growth_linearized(m, m.L + 0.5 * m.L0) ==
        doctest::Approx(0.5 * (m.r - m.q)).epsilon(1e-12));
}

TEST_CASE("growth symmetry and continuity") {
  const GrowthModel m = reference_model();
  for (double x = 0.0; x <= 8.0; x += 0.173) {
    for (double u : {0.0, 0.4, 1.1}) {
      CHECK(m.eval(x, u) == doctest::Approx(m.eval(-x, u)).epsilon(1e-13));
    }
  }
  for (double edge : {m.L, m.L + m.L0, -m.L, -(m.L + m.L0)}) {
    for (double u : {0.0, 0.5, 1.0}) {
      const double inner = m.eval(edge - 1e-9 * (edge > 0 ? 1 : -1), u);
      const double outer = m.eval(edge + 1e-9 * (edge > 0 ? 1 : -1), u);
      CHECK(std::abs(inner - outer) < 1e-7);
      CHECK(std::abs(m.eval(edge, u) - inner) < 1e-7);
    }
  }
}

TEST_CASE("growth is non-increasing in u") {
  const GrowthModel m = reference_model();
  const double du = 1e-6;
  for (double x = -8.0; x <= 8.0; x += 0.311) {
    for (double u : {0.0, 0.3, 0.9, 1.5}) {
      CHECK(m.eval(x, u + du) <= m.eval(x, u) + 1e-14);
    }
  }
}

TEST_CASE("growth bounds and monotone dependence on L") {
  const GrowthModel m = reference_model();
  GrowthModel wider = m;
  wider.L = 7.0;
  for (double x = -10.0; x <= 10.0; x += 0.217) {
    CHECK(m.linearized(x) >= -m.q - 1e-15);
    CHECK(m.linearized(x) <= m.r + 1e-15);
    for (double u : {0.0, 0.5, 1.0}) {
      CHECK(m.eval(x, u) <= wider.eval(x, u) + 1e-13);
    }
  }
}

TEST_CASE("homogeneous limit") {
  GrowthModel m = reference_model();
  m.transition = Transition::Homogeneous;
  for (double x : {-20.0, 0.0, 13.5}) {
    CHECK(m.eval(x, 0.25) == doctest::Approx(m.r * 0.75).epsilon(1e-15));
  }
}

TEST_CASE("growth parameter validation") {
  GrowthModel m = reference_model();
  m.q = 0.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("linearized antiderivative matches quadrature") {
  const GrowthModel m = reference_model();
  for (double x : {0.7, 5.0, 5.6, 6.0, 9.3, -4.0, -5.7, -11.0}) {
    const double oracle = detail::adaptive_simpson(
        [&](double s) { return m.linearized(s); }, 0.0, x, 1e-12);
    CHECK(growth_linearized_antiderivative(m, x) ==
          doctest::Approx(oracle).epsilon(1e-10));
  }
}
