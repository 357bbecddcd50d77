#pragma once

#include "rgl/distribution.hpp"

namespace rgl {

// Large deviation rate I(x) = sup_t [x t - log mgf(t)], evaluated by solving
// the tilted-mean equation. Nonnegative, zero exactly at the mean, +inf
// outside the support hull; at a finite hull edge carrying an atom of mass m
// the value is -log(m), computed analytically.
class RateFunction {
 public:
  explicit RateFunction(Law law) : law_(std::move(law)) {}

  double operator()(double x) const;

  // t with tilted_mean(t) = x for x strictly inside the hull. Throws
  // std::domain_error ("domain overflow") if no |t| <= 700 brackets x.
  double solve_tilt(double x) const;

  double mean() const { return law_.mean; }
  double ess_inf() const { return law_.ess_inf; }
  double ess_sup() const { return law_.ess_sup; }
  double mass_at_inf() const { return law_.mass_at_inf; }
  double mass_at_sup() const { return law_.mass_at_sup; }

 private:
  Law law_;
};

// Bernoulli rate function H_q(x) = x log(x/q) + (1-x) log((1-x)/(1-q)),
// with the 0 log 0 = 0 convention. Requires q in (0,1) and x in [0,1].
double entropy(double q, double x);

}  // namespace rgl
