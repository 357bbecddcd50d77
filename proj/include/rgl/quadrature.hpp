#pragma once

#include <functional>
#include <stdexcept>

namespace rgl {

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;  // sum of the per-interval Richardson estimates
  int splits = 0;
};

// Thrown when the split budget is exhausted before the requested absolute
// tolerance is met; the message carries the achieved error bound.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

// Adaptive Simpson on [a, b] to an absolute tolerance, with a hard cap on
// the number of interval splits.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, int max_splits = 10000);

}  // namespace rgl
