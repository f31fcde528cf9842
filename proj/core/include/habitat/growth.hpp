#pragma once

namespace habitat {

enum class Transition {
  CosineSine,   // cosine/sine blend across the transition bands
  Homogeneous,  // f = r(1-u) everywhere (the L -> infinity limit)
};

/// Piecewise reaction term f(x,u): logistic growth r(1-u) on the favorable
/// patch |x| <= L, constant mortality -q for |x| >= L+L0, blended across the
/// width-L0 transition bands.
struct GrowthModel {
  double r = 1.0;
  double q = 1.0;
  double L = 5.0;
  double L0 = 1.0;
  Transition transition = Transition::CosineSine;

  void validate() const;  // throws on non-positive parameters

  double eval(double x, double u) const;
  double linearized(double x) const;  // f(x, 0)
  double patch_edge() const { return L + L0; }
};

double growth_eval(const GrowthModel& model, double x, double u);
double growth_linearized(const GrowthModel& model, double x);

/// Antiderivative of f(.,0) with F(0) = 0, exact on each piece. Used by the
/// periodic resolvent where the advection factor needs exact integrals of the
/// coefficient.
double growth_linearized_antiderivative(const GrowthModel& model, double x);

}  // namespace habitat
