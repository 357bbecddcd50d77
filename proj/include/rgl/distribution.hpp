#pragma once

#include <functional>
#include <random>
#include <variant>
#include <vector>

namespace rgl {

// Payoff distribution kinds. Only laws with an everywhere-finite moment
// generating function are representable: bounded support or Gaussian.
struct Bernoulli {
  double p;
};

struct FiniteDiscrete {
  std::vector<double> values;  // strictly increasing
  std::vector<double> masses;  // strictly positive, sum to 1
};

struct Uniform {
  double a;
  double b;
};

struct Gaussian {
  double mu;
  double sigma;
};

using ContinuousPart = std::variant<Uniform, Gaussian>;

struct Mixed {
  ContinuousPart cont;
  double weight;  // mass of the continuous part
  std::vector<double> atom_values;
  std::vector<double> atom_masses;
};

struct Atom {
  double value;
  double mass;
};

// Cumulant data backing a rate function: psi(t) = log E[exp(tX)] and its
// derivative, the mean of the exponentially tilted law.
struct Law {
  double mean = 0.0;
  double ess_inf = 0.0;
  double ess_sup = 0.0;
  double mass_at_inf = 0.0;  // atom mass at a finite lower hull edge
  double mass_at_sup = 0.0;
  std::function<double(double)> log_mgf;
  std::function<double(double)> tilted_mean;
};

// Immutable payoff law F. Thread-safe to share; sampling takes the caller's
// generator state explicitly.
class PayoffDistribution {
 public:
  using Spec = std::variant<Bernoulli, FiniteDiscrete, Uniform, Gaussian, Mixed>;

  explicit PayoffDistribution(Spec spec);

  const Spec& spec() const { return spec_; }
  bool is_bernoulli() const { return std::holds_alternative<Bernoulli>(spec_); }
  bool is_discrete() const;  // purely atomic
  bool is_atomless() const { return atoms_.empty(); }

  // Atom set L with masses P(X = l).
  const std::vector<Atom>& atom_set() const { return atoms_; }
  double alpha() const { return alpha_; }        // P(X = X') = sum of squared masses
  double beta() const { return 0.5 * (1.0 - alpha_); }  // P(X > X')

  double cdf(double x) const;       // right-continuous F(x)
  double cdf_left(double x) const;  // F(x-)
  double mean() const;
  double mgf(double t) const;
  double log_mgf(double t) const;
  double tilted_mean(double t) const;  // d/dt log mgf

  double ess_inf() const { return ess_inf_; }
  double ess_sup() const { return ess_sup_; }

  double sample(std::mt19937_64& rng) const;

  Law law() const;

 private:
  Spec spec_;
  std::vector<Atom> atoms_;
  double alpha_ = 0.0;
  double ess_inf_ = 0.0;
  double ess_sup_ = 0.0;
};

// The law of X given X >= X', with X' an independent copy. For a purely
// atomic base this is again finite-discrete with mass m(l) F(l) / (1 - beta);
// for an atomless base the CDF is F(y)^2; mixed bases carry both a
// (sub-probability) continuous part with density proportional to f(y) F(y)
// and reweighted atoms.
class ConditionedDistribution {
 public:
  explicit ConditionedDistribution(PayoffDistribution base);

  const PayoffDistribution& base() const { return base_; }
  bool is_discrete() const { return base_.is_discrete(); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  double continuous_weight() const { return cont_weight_; }

  double cdf(double y) const;
  double mean() const;
  double mgf(double t) const;
  double log_mgf(double t) const;
  double tilted_mean(double t) const;

  double ess_inf() const { return base_.ess_inf(); }
  double ess_sup() const { return base_.ess_sup(); }

  Law law() const;

 private:
  double continuous_integral(const std::function<double(double)>& weight, double lo,
                             double hi) const;

  PayoffDistribution base_;
  std::vector<Atom> atoms_;   // conditioned atom masses
  double cont_weight_ = 0.0;  // 1 - sum of conditioned atom masses
};

ConditionedDistribution condition_on_max(const PayoffDistribution& d);

inline std::pair<double, double> alpha_beta(const PayoffDistribution& d) {
  return {d.alpha(), d.beta()};
}

}  // namespace rgl
