#include "rgl/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "rgl/quadrature.hpp"
#include "rgl/rng.hpp"

namespace rgl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-12;
constexpr double kQuadTol = 1e-10;
// Truncation radius for Gaussian quadrature ranges, in units of sigma.
// The discarded tail mass is below exp(-0.5 * 14^2) ~ 3e-43.
constexpr double kGaussSpan = 14.0;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double gaussian_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

double gaussian_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// log(sinh(h) / h), stable over the whole real line.
double log_sinhc(double h) {
  h = std::abs(h);
  if (h < 1e-4) return h * h / 6.0 - h * h * h * h / 180.0;
  if (h < 300.0) return std::log(std::sinh(h) / h);
  return h - std::log(2.0 * h);  // exp(-2h) term is far below double precision
}

// Mean of the exponentially tilted Uniform(0,1): 1/(1-exp(-u)) - 1/u.
double tilted_uniform01_mean(double u) {
  if (std::abs(u) < 1e-5) return 0.5 + u / 12.0 - u * u * u / 720.0;
  return 1.0 / (-std::expm1(-u)) - 1.0 / u;
}

double cont_log_mgf(const ContinuousPart& c, double t) {
  if (const auto* u = std::get_if<Uniform>(&c)) {
    return 0.5 * t * (u->a + u->b) + log_sinhc(0.5 * t * (u->b - u->a));
  }
  const auto& g = std::get<Gaussian>(c);
  return g.mu * t + 0.5 * g.sigma * g.sigma * t * t;
}

double cont_tilted_mean(const ContinuousPart& c, double t) {
  if (const auto* u = std::get_if<Uniform>(&c)) {
    return u->a + (u->b - u->a) * tilted_uniform01_mean(t * (u->b - u->a));
  }
  const auto& g = std::get<Gaussian>(c);
  return g.mu + g.sigma * g.sigma * t;
}

double cont_mean(const ContinuousPart& c) {
  if (const auto* u = std::get_if<Uniform>(&c)) return 0.5 * (u->a + u->b);
  return std::get<Gaussian>(c).mu;
}

double cont_cdf(const ContinuousPart& c, double x) {
  if (const auto* u = std::get_if<Uniform>(&c)) {
    if (x <= u->a) return 0.0;
    if (x >= u->b) return 1.0;
    return (x - u->a) / (u->b - u->a);
  }
  const auto& g = std::get<Gaussian>(c);
  return gaussian_cdf(x, g.mu, g.sigma);
}

double cont_pdf(const ContinuousPart& c, double x) {
  if (const auto* u = std::get_if<Uniform>(&c)) {
    return (x >= u->a && x <= u->b) ? 1.0 / (u->b - u->a) : 0.0;
  }
  const auto& g = std::get<Gaussian>(c);
  return gaussian_pdf(x, g.mu, g.sigma);
}

// Density of the tilted continuous part, exp(t*y - psi_c(t)) * pdf(y).
// Evaluated in closed form so it stays scaled to order one for any tilt.
double cont_tilted_pdf(const ContinuousPart& c, double t, double y) {
  if (const auto* u = std::get_if<Uniform>(&c)) {
    if (y < u->a || y > u->b) return 0.0;
    return std::exp(t * y - cont_log_mgf(c, t) - std::log(u->b - u->a));
  }
  const auto& g = std::get<Gaussian>(c);
  return gaussian_pdf(y, g.mu + g.sigma * g.sigma * t, g.sigma);
}

// Quadrature range holding all but a negligible sliver of the tilted mass.
std::pair<double, double> cont_quad_range(const ContinuousPart& c, double t) {
  if (const auto* u = std::get_if<Uniform>(&c)) return {u->a, u->b};
  const auto& g = std::get<Gaussian>(c);
  const double center = g.mu + g.sigma * g.sigma * t;
  return {center - kGaussSpan * g.sigma, center + kGaussSpan * g.sigma};
}

struct ContView {
  double weight;
  ContinuousPart part;
};

std::optional<ContView> cont_view(const PayoffDistribution::Spec& s) {
  if (const auto* u = std::get_if<Uniform>(&s)) return ContView{1.0, *u};
  if (const auto* g = std::get_if<Gaussian>(&s)) return ContView{1.0, *g};
  if (const auto* m = std::get_if<Mixed>(&s)) return ContView{m->weight, m->cont};
  return std::nullopt;
}

double logsumexp(const std::vector<double>& terms) {
  double m = -kInf;
  for (double v : terms) m = std::max(m, v);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double v : terms) s += std::exp(v - m);
  return m + std::log(s);
}

double discrete_log_mgf(const std::vector<Atom>& atoms, double t) {
  std::vector<double> terms;
  terms.reserve(atoms.size());
  for (const auto& a : atoms) terms.push_back(std::log(a.mass) + t * a.value);
  return logsumexp(terms);
}

double discrete_tilted_mean(const std::vector<Atom>& atoms, double t) {
  double m = -kInf;
  for (const auto& a : atoms) m = std::max(m, std::log(a.mass) + t * a.value);
  double num = 0.0, den = 0.0;
  for (const auto& a : atoms) {
    const double w = std::exp(std::log(a.mass) + t * a.value - m);
    num += w * a.value;
    den += w;
  }
  return num / den;
}

void validate_atom_list(const std::vector<double>& values, const std::vector<double>& masses) {
  require(values.size() == masses.size(), "atom values and masses differ in length");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]), "atom value must be finite");
    require(masses[i] > 0.0 && masses[i] <= 1.0, "atom mass must lie in (0,1]");
    if (i > 0) require(values[i] > values[i - 1], "atom values must be strictly increasing");
  }
}

}  // namespace

PayoffDistribution::PayoffDistribution(Spec spec) : spec_(std::move(spec)) {
  std::visit(
      [this](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          require(s.p >= 0.0 && s.p <= 1.0, "bernoulli: p must lie in [0,1]");
          if (s.p < 1.0) atoms_.push_back({0.0, 1.0 - s.p});
          if (s.p > 0.0) atoms_.push_back({1.0, s.p});
          ess_inf_ = atoms_.front().value;
          ess_sup_ = atoms_.back().value;
        } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          require(!s.values.empty(), "discrete: empty support");
          validate_atom_list(s.values, s.masses);
          double total = 0.0;
          for (std::size_t i = 0; i < s.values.size(); ++i) {
            atoms_.push_back({s.values[i], s.masses[i]});
            total += s.masses[i];
          }
          require(std::abs(total - 1.0) <= kMassTol, "discrete: masses must sum to 1");
          ess_inf_ = s.values.front();
          ess_sup_ = s.values.back();
        } else if constexpr (std::is_same_v<T, Uniform>) {
          require(std::isfinite(s.a) && std::isfinite(s.b) && s.a < s.b,
                  "uniform: need finite a < b");
          ess_inf_ = s.a;
          ess_sup_ = s.b;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          require(std::isfinite(s.mu) && std::isfinite(s.sigma) && s.sigma > 0.0,
                  "gaussian: need finite mu and sigma > 0");
          ess_inf_ = -kInf;
          ess_sup_ = kInf;
        } else if constexpr (std::is_same_v<T, Mixed>) {
          require(s.weight > 0.0 && s.weight <= 1.0, "mixed: continuous weight must lie in (0,1]");
          validate_atom_list(s.atom_values, s.atom_masses);
          double total = s.weight;
          for (std::size_t i = 0; i < s.atom_values.size(); ++i) {
            atoms_.push_back({s.atom_values[i], s.atom_masses[i]});
            total += s.atom_masses[i];
          }
          require(std::abs(total - 1.0) <= kMassTol,
                  "mixed: continuous weight plus atom masses must sum to 1");
          double lo, hi;
          if (const auto* u = std::get_if<Uniform>(&s.cont)) {
            require(std::isfinite(u->a) && std::isfinite(u->b) && u->a < u->b,
                    "uniform: need finite a < b");
            lo = u->a;
            hi = u->b;
          } else {
            const auto& g = std::get<Gaussian>(s.cont);
            require(std::isfinite(g.mu) && std::isfinite(g.sigma) && g.sigma > 0.0,
                    "gaussian: need finite mu and sigma > 0");
            lo = -kInf;
            hi = kInf;
          }
          if (!s.atom_values.empty()) {
            lo = std::min(lo, s.atom_values.front());
            hi = std::max(hi, s.atom_values.back());
          }
          ess_inf_ = lo;
          ess_sup_ = hi;
        }
      },
      spec_);
  alpha_ = 0.0;
  for (const auto& a : atoms_) alpha_ += a.mass * a.mass;
}

bool PayoffDistribution::is_discrete() const {
  return std::holds_alternative<Bernoulli>(spec_) || std::holds_alternative<FiniteDiscrete>(spec_);
}

double PayoffDistribution::cdf(double x) const {
  double v = 0.0;
  if (auto c = cont_view(spec_)) v = c->weight * cont_cdf(c->part, x);
  for (const auto& a : atoms_)
    if (a.value <= x) v += a.mass;
  return v;
}

double PayoffDistribution::cdf_left(double x) const {
  double v = 0.0;
  if (auto c = cont_view(spec_)) v = c->weight * cont_cdf(c->part, x);
  for (const auto& a : atoms_)
    if (a.value < x) v += a.mass;
  return v;
}

double PayoffDistribution::mean() const {
  double v = 0.0;
  if (auto c = cont_view(spec_)) v = c->weight * cont_mean(c->part);
  for (const auto& a : atoms_) v += a.mass * a.value;
  return v;
}

double PayoffDistribution::log_mgf(double t) const {
  require(std::isfinite(t), "mgf: t must be finite");
  const auto c = cont_view(spec_);
  if (!c) return discrete_log_mgf(atoms_, t);
  if (atoms_.empty()) return cont_log_mgf(c->part, t);
  std::vector<double> terms;
  terms.push_back(std::log(c->weight) + cont_log_mgf(c->part, t));
  for (const auto& a : atoms_) terms.push_back(std::log(a.mass) + t * a.value);
  return logsumexp(terms);
}

double PayoffDistribution::mgf(double t) const { return std::exp(log_mgf(t)); }

double PayoffDistribution::tilted_mean(double t) const {
  require(std::isfinite(t), "tilted_mean: t must be finite");
  const auto c = cont_view(spec_);
  if (!c) return discrete_tilted_mean(atoms_, t);
  if (atoms_.empty()) return cont_tilted_mean(c->part, t);
  // Softmax combination of the component tilted means.
  std::vector<double> lw{std::log(c->weight) + cont_log_mgf(c->part, t)};
  std::vector<double> means{cont_tilted_mean(c->part, t)};
  for (const auto& a : atoms_) {
    lw.push_back(std::log(a.mass) + t * a.value);
    means.push_back(a.value);
  }
  double m = -kInf;
  for (double v : lw) m = std::max(m, v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    const double w = std::exp(lw[i] - m);
    num += w * means[i];
    den += w;
  }
  return num / den;
}

double PayoffDistribution::sample(std::mt19937_64& rng) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return uniform01(rng) < s.p ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          double u = uniform01(rng);
          for (const auto& a : atoms_) {
            if (u < a.mass) return a.value;
            u -= a.mass;
          }
          return atoms_.back().value;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return s.a + (s.b - s.a) * uniform01(rng);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return s.mu + s.sigma * standard_normal(rng);
        } else {
          // Composition: the selector draw doubles as the atom selector, so
          // the number of draws per sample is fixed per branch.
          double u = uniform01(rng);
          if (u < s.weight) {
            if (const auto* un = std::get_if<Uniform>(&s.cont))
              return un->a + (un->b - un->a) * uniform01(rng);
            const auto& g = std::get<Gaussian>(s.cont);
            return g.mu + g.sigma * standard_normal(rng);
          }
          u -= s.weight;
          for (const auto& a : atoms_) {
            if (u < a.mass) return a.value;
            u -= a.mass;
          }
          return atoms_.back().value;
        }
      },
      spec_);
}

Law PayoffDistribution::law() const {
  Law law;
  law.mean = mean();
  law.ess_inf = ess_inf_;
  law.ess_sup = ess_sup_;
  for (const auto& a : atoms_) {
    if (a.value == ess_inf_) law.mass_at_inf = a.mass;
    if (a.value == ess_sup_) law.mass_at_sup = a.mass;
  }
  law.log_mgf = [d = *this](double t) { return d.log_mgf(t); };
  law.tilted_mean = [d = *this](double t) { return d.tilted_mean(t); };
  return law;
}

// ---------------------------------------------------------------------------
// ConditionedDistribution

ConditionedDistribution::ConditionedDistribution(PayoffDistribution base)
    : base_(std::move(base)) {
  const double norm = 1.0 - base_.beta();  // P(X >= X') = (1 + alpha) / 2
  double atom_total = 0.0;
  for (const auto& a : base_.atom_set()) {
    const double mass = a.mass * base_.cdf(a.value) / norm;
    atoms_.push_back({a.value, mass});
    atom_total += mass;
  }
  cont_weight_ = base_.is_discrete() ? 0.0 : std::max(0.0, 1.0 - atom_total);
}

// Integral of h(y) * pdf_cont(y) * F(y) over [lo, hi]; the continuous part's
// own weight is applied by the caller.
double ConditionedDistribution::continuous_integral(const std::function<double(double)>& h,
                                                    double lo, double hi) const {
  const auto c = cont_view(base_.spec());
  if (!c || !(lo < hi)) return 0.0;
  auto integrand = [&](double y) { return h(y) * cont_pdf(c->part, y) * base_.cdf(y); };
  return integrate(integrand, lo, hi, kQuadTol).value;
}

double ConditionedDistribution::cdf(double y) const {
  if (base_.is_atomless()) {
    const double f = base_.cdf(y);
    return f * f;  // exact when there are no atoms
  }
  if (base_.is_discrete()) {
    double v = 0.0;
    for (const auto& a : atoms_)
      if (a.value <= y) v += a.mass;
    return v;
  }
  const auto c = cont_view(base_.spec());
  const double norm = 1.0 - base_.beta();
  auto [lo, hi] = cont_quad_range(c->part, 0.0);
  double v = 0.0;
  if (y > lo)
    v = c->weight / norm * continuous_integral([](double) { return 1.0; }, lo, std::min(y, hi));
  for (const auto& a : atoms_)
    if (a.value <= y) v += a.mass;
  return v;
}

double ConditionedDistribution::mean() const {
  double v = 0.0;
  for (const auto& a : atoms_) v += a.mass * a.value;
  if (base_.is_discrete()) return v;
  const auto c = cont_view(base_.spec());
  const double norm = 1.0 - base_.beta();
  auto [lo, hi] = cont_quad_range(c->part, 0.0);
  return v + c->weight / norm * continuous_integral([](double y) { return y; }, lo, hi);
}

double ConditionedDistribution::log_mgf(double t) const {
  if (!std::isfinite(t)) throw std::invalid_argument("mgf: t must be finite");
  if (base_.is_discrete()) return discrete_log_mgf(atoms_, t);

  const auto c = cont_view(base_.spec());
  const double norm = 1.0 - base_.beta();
  auto [lo, hi] = cont_quad_range(c->part, t);
  // log int exp(ty) pdf(y) F(y) dy = psi_c(t) + log of a tilted-density
  // integral that lies in (0, 1], so no exponent ever overflows.
  auto tilted = [&](double y) { return cont_tilted_pdf(c->part, t, y) * base_.cdf(y); };
  const double frac = integrate(tilted, lo, hi, kQuadTol).value;
  const double cont_term =
      std::log(c->weight / norm) + cont_log_mgf(c->part, t) + std::log(std::max(frac, 1e-300));
  if (atoms_.empty()) return cont_term;
  std::vector<double> terms{cont_term};
  for (const auto& a : atoms_) terms.push_back(std::log(a.mass) + t * a.value);
  return logsumexp(terms);
}

double ConditionedDistribution::mgf(double t) const { return std::exp(log_mgf(t)); }

double ConditionedDistribution::tilted_mean(double t) const {
  if (!std::isfinite(t)) throw std::invalid_argument("tilted_mean: t must be finite");
  if (base_.is_discrete()) return discrete_tilted_mean(atoms_, t);

  const auto c = cont_view(base_.spec());
  const double norm = 1.0 - base_.beta();
  auto [lo, hi] = cont_quad_range(c->part, t);
  auto tilted0 = [&](double y) { return cont_tilted_pdf(c->part, t, y) * base_.cdf(y); };
  auto tilted1 = [&](double y) { return y * cont_tilted_pdf(c->part, t, y) * base_.cdf(y); };
  const double f0 = std::max(integrate(tilted0, lo, hi, kQuadTol).value, 1e-300);
  const double f1 = integrate(tilted1, lo, hi, kQuadTol).value;
  const double cont_mean_t = f1 / f0;
  if (atoms_.empty()) return cont_mean_t;

  const double cont_lw = std::log(c->weight / norm) + cont_log_mgf(c->part, t) + std::log(f0);
  double m = cont_lw;
  for (const auto& a : atoms_) m = std::max(m, std::log(a.mass) + t * a.value);
  double num = std::exp(cont_lw - m) * cont_mean_t;
  double den = std::exp(cont_lw - m);
  for (const auto& a : atoms_) {
    const double w = std::exp(std::log(a.mass) + t * a.value - m);
    num += w * a.value;
    den += w;
  }
  return num / den;
}

Law ConditionedDistribution::law() const {
  Law law;
  law.mean = mean();
  law.ess_inf = ess_inf();
  law.ess_sup = ess_sup();
  for (const auto& a : atoms_) {
    if (a.value == law.ess_inf) law.mass_at_inf = a.mass;
    if (a.value == law.ess_sup) law.mass_at_sup = a.mass;
  }
  law.log_mgf = [d = *this](double t) { return d.log_mgf(t); };
  law.tilted_mean = [d = *this](double t) { return d.tilted_mean(t); };
  return law;
}

ConditionedDistribution condition_on_max(const PayoffDistribution& d) {
  return ConditionedDistribution(d);
}

}  // namespace rgl
