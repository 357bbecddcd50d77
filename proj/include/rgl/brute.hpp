#pragma once

#include <span>
#include <vector>

namespace rgl {

// Exact moments from p-weighted enumeration of every Bernoulli payoff table.
struct BruteForceResult {
  int n = 0;
  double p = 0.0;
  double alpha = 0.0;
  double p_tilde = 0.0;
  double e_ne = 0.0;  // E|NE|

  struct ZMoments {
    double x = 0.0;
    double e_plus = 0.0;       // E|Z^+_x|
    double e_plus_sq = 0.0;    // E|Z^+_x|^2
    double var_plus = 0.0;
    double ratio_plus = 0.0;   // E|Z^+_x|^2 / E|Z^+_x|^2 mean-square ratio
    double e_minus = 0.0;
    double e_minus_sq = 0.0;
  };
  std::vector<ZMoments> z;
};

// Enumerates all 2^(n 2^n) payoff tables; requires n * 2^n <= 24.
BruteForceResult brute_force_expectations(int n, double p, std::span<const double> xs);

}  // namespace rgl
