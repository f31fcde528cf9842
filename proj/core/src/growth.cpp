#include "habitat/growth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace habitat {

void GrowthModel::validate() const {
  if (!(r > 0.0) || !(q > 0.0) || !(L > 0.0) || !(L0 > 0.0)) {
    throw std::invalid_argument("GrowthModel: r, q, L, L0 must all be positive");
  }
}

double GrowthModel::eval(double x, double u) const {
  const double logistic = r * (1.0 - u);
  if (transition == Transition::Homogeneous) return logistic;
  const double ax = std::abs(x);
  if (ax <= L) return logistic;
  if (ax >= L + L0) return -q;
  if (x > 0.0) {
    const double blend = 0.5 * (1.0 + std::cos(std::numbers::pi * (x - L) / L0));
    return -q + (logistic + q) * blend;
  }
  const double blend =
      0.5 * (1.0 + std::sin(std::numbers::pi * (2.0 * x + 2.0 * L + L0) / (2.0 * L0)));
  return -q + (logistic + q) * blend;
}

double GrowthModel::linearized(double x) const {
  return eval(x, 0.0);
}

double growth_eval(const GrowthModel& model, double x, double u) {
  return model.eval(x, u);
}

double growth_linearized(const GrowthModel& model, double x) {
  return model.linearized(x);
}

double growth_linearized_antiderivative(const GrowthModel& model, double x) {
  if (model.transition == Transition::Homogeneous) return model.r * x;
  // f(.,0) is even, so the antiderivative with F(0)=0 is odd.
  const double sign = x < 0.0 ? -1.0 : 1.0;
  const double ax = std::abs(x);
  const double r = model.r;
  const double q = model.q;
  const double L = model.L;
  const double L0 = model.L0;
  double value;
  if (ax <= L) {
    value = r * ax;
  } else if (ax <= L + L0) {
    const double s = ax - L;
    value = r * L - q * s +
            0.5 * (r + q) *
                (s + L0 / std::numbers::pi * std::sin(std::numbers::pi * s / L0));
  } else {
    value = r * L + 0.5 * (r - q) * L0 - q * (ax - L - L0);
  }
  return sign * value;
}

}  // namespace habitat
