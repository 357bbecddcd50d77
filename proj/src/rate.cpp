#include "rgl/rate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rgl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(+-700) spans the double range; beyond that the tilt is numerically
// degenerate and the caller is asking for a point at the very support edge.
constexpr double kTiltCap = 700.0;
constexpr double kTiltTol = 1e-12;

}  // namespace

double RateFunction::solve_tilt(double x) const {
  double lo = -1.0, hi = 1.0;
  while (law_.tilted_mean(hi) < x) {
    lo = hi;
    hi *= 2.0;
    if (hi > kTiltCap)
      throw std::domain_error("rate: domain overflow, no tilt in |t| <= 700 reaches x");
  }
  while (law_.tilted_mean(lo) > x) {
    hi = lo;
    lo *= 2.0;
    if (lo < -kTiltCap)
      throw std::domain_error("rate: domain overflow, no tilt in |t| <= 700 reaches x");
  }
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double g = law_.tilted_mean(mid) - x;
    if (std::abs(g) <= kTiltTol) return mid;
    (g < 0.0 ? lo : hi) = mid;
    if (hi - lo < 4e-16 * std::max(1.0, std::abs(mid))) break;
  }
  return mid;
}

double RateFunction::operator()(double x) const {
  if (x < law_.ess_inf || x > law_.ess_sup) return kInf;
  if (x == law_.ess_sup && std::isfinite(x))
    return law_.mass_at_sup > 0.0 ? -std::log(law_.mass_at_sup) : kInf;
  if (x == law_.ess_inf && std::isfinite(x))
    return law_.mass_at_inf > 0.0 ? -std::log(law_.mass_at_inf) : kInf;
  if (x == law_.mean) return 0.0;
  const double t = solve_tilt(x);
  return std::max(0.0, x * t - law_.log_mgf(t));
}

double entropy(double q, double x) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("entropy: q must lie in (0,1)");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("entropy: x must lie in [0,1]");
  double v = 0.0;
  if (x > 0.0) v += x * std::log(x / q);
  if (x < 1.0) v += (1.0 - x) * std::log((1.0 - x) / (1.0 - q));
  return std::max(0.0, v);
}

}  // namespace rgl
