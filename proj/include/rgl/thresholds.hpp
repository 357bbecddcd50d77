#pragma once

#include "rgl/distribution.hpp"
#include "rgl/rate.hpp"

namespace rgl {

// Limit quantities for a payoff law: the level-log(2) crossing of its rate
// function above the mean (x_opt), the mean of the conditioned law (x_typ),
// and the level-log(1+alpha) crossings of the conditioned rate on either
// side of x_typ (x_beq, x_weq). For an atomless law the equilibrium values
// collapse to x_typ (degenerate regime).
struct TheoryResult {
  double alpha = 0.0;
  double beta = 0.0;
  double x_typ = 0.0;
  double x_opt = 0.0;
  double x_beq = 0.0;
  double x_weq = 0.0;
  bool atomless = false;  // degenerate-regime flag (alpha == 0)
};

double solve_x_opt(const PayoffDistribution& d);
double solve_x_beq(const PayoffDistribution& d);
double solve_x_weq(const PayoffDistribution& d);
TheoryResult theory_limits(const PayoffDistribution& d);

// Closed-form route for Bernoulli(p), p in (0,1): alpha = p^2 + (1-p)^2,
// p_tilde = p / (1 - p + p^2), thresholds by entropy-level root finding.
struct BernoulliLimits {
  double alpha = 0.0;
  double p_tilde = 0.0;
  double x_typ = 0.0;
  double x_opt = 0.0;
  double x_beq = 0.0;
  double x_weq = 0.0;
};

BernoulliLimits bernoulli_limits(double p);

}  // namespace rgl
