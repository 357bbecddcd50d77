#include "rgl/thresholds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rgl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Absolute slack when comparing a rate boundary value against the level;
// catches the exact-equality cases (e.g. Bernoulli p = 1/2) without moving
// any genuinely interior crossing by more than the solver tolerance.
constexpr double kLevelSlack = 1e-12;
constexpr int kBisectIters = 200;

// Crossing of a monotone function with `level` inside [lo, hi]. Bisection
// only: the rate can have an infinite one-sided slope at the support edge,
// where Newton steps are unsafe.
template <typename F>
double bisect_level(F&& f, double lo, double hi, double level, bool increasing) {
  for (int i = 0; i < kBisectIters && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool above = f(mid) > level;
    if (above == increasing)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Upper bracket for an unbounded-support rate: expand until the level is
// exceeded. Every admitted unbounded kind has a Gaussian tail, so this
// always terminates quickly.
template <typename F>
double expand_up(F&& f, double from, double level) {
  double step = 1.0;
  for (int i = 0; i < 80; ++i) {
    if (f(from + step) > level) return from + step;
    step *= 2.0;
  }
  throw std::runtime_error("level crossing not bracketed on unbounded support");
}

template <typename F>
double expand_down(F&& f, double from, double level) {
  double step = 1.0;
  for (int i = 0; i < 80; ++i) {
    if (f(from - step) > level) return from - step;
    step *= 2.0;
  }
  throw std::runtime_error("level crossing not bracketed on unbounded support");
}

// Level crossing of `rate` above its mean.
double upper_crossing(const RateFunction& rate, double level) {
  const double mean = rate.mean();
  double hi;
  if (std::isfinite(rate.ess_sup())) {
    if (rate(rate.ess_sup()) <= level + kLevelSlack) return rate.ess_sup();
    hi = rate.ess_sup();
  } else {
    hi = expand_up([&](double x) { return rate(x); }, mean, level);
  }
  return bisect_level([&](double x) { return rate(x); }, mean, hi, level, /*increasing=*/true);
}

// Level crossing of `rate` below its mean.
double lower_crossing(const RateFunction& rate, double level) {
  const double mean = rate.mean();
  double lo;
  if (std::isfinite(rate.ess_inf())) {
    if (rate(rate.ess_inf()) <= level + kLevelSlack) return rate.ess_inf();
    lo = rate.ess_inf();
  } else {
    lo = expand_down([&](double x) { return rate(x); }, mean, level);
  }
  return bisect_level([&](double x) { return rate(x); }, lo, mean, level, /*increasing=*/false);
}

double beq_from(const ConditionedDistribution& cond, double alpha) {
  if (alpha == 0.0) return cond.mean();
  return upper_crossing(RateFunction(cond.law()), std::log1p(alpha));
}

double weq_from(const ConditionedDistribution& cond, double alpha) {
  if (alpha == 0.0) return cond.mean();
  return lower_crossing(RateFunction(cond.law()), std::log1p(alpha));
}

}  // namespace

double solve_x_opt(const PayoffDistribution& d) {
  return upper_crossing(RateFunction(d.law()), std::log(2.0));
}

double solve_x_beq(const PayoffDistribution& d) {
  return beq_from(condition_on_max(d), d.alpha());
}

double solve_x_weq(const PayoffDistribution& d) {
  return weq_from(condition_on_max(d), d.alpha());
}

TheoryResult theory_limits(const PayoffDistribution& d) {
  TheoryResult r;
  r.alpha = d.alpha();
  r.beta = d.beta();
  r.atomless = d.is_atomless();
  if (const auto* b = std::get_if<Bernoulli>(&d.spec()); b && b->p > 0.0 && b->p < 1.0) {
    const BernoulliLimits bl = bernoulli_limits(b->p);
    r.x_typ = bl.x_typ;
    r.x_opt = bl.x_opt;
    r.x_beq = bl.x_beq;
    r.x_weq = bl.x_weq;
    return r;
  }
  const ConditionedDistribution cond = condition_on_max(d);
  r.x_typ = cond.mean();
  r.x_opt = solve_x_opt(d);
  r.x_beq = beq_from(cond, r.alpha);
  r.x_weq = weq_from(cond, r.alpha);
  return r;
}

BernoulliLimits bernoulli_limits(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bernoulli_limits: p must lie in (0,1)");
  BernoulliLimits r;
  r.alpha = p * p + (1.0 - p) * (1.0 - p);
  r.p_tilde = p / (1.0 - p + p * p);
  r.x_typ = r.p_tilde;

  const double level2 = std::log(2.0);
  const double level_a = std::log1p(r.alpha);

  // H_p(1) = -log p <= log 2  iff  p >= 1/2.
  if (-std::log(p) <= level2 + kLevelSlack)
    r.x_opt = 1.0;
  else
    r.x_opt = bisect_level([&](double x) { return entropy(p, x); }, p, 1.0, level2, true);

  if (-std::log(r.p_tilde) <= level_a + kLevelSlack)
    r.x_beq = 1.0;
  else
    r.x_beq =
        bisect_level([&](double x) { return entropy(r.p_tilde, x); }, r.p_tilde, 1.0, level_a, true);

  if (-std::log1p(-r.p_tilde) <= level_a + kLevelSlack)
    r.x_weq = 0.0;
  else
    r.x_weq = bisect_level([&](double x) { return entropy(r.p_tilde, x); }, 0.0, r.p_tilde, level_a,
                           false);
  return r;
}

}  // namespace rgl
