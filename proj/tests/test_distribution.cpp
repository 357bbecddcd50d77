#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "rgl/dist_spec.hpp"
#include "rgl/distribution.hpp"
#include "rgl/quadrature.hpp"
#include "rgl/rng.hpp"

using namespace rgl;

namespace {

PayoffDistribution three_point_uniform() {
  return PayoffDistribution(FiniteDiscrete{{0.0, 1.0, 2.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
}

PayoffDistribution mixed_example() {
  // mixed:cont=uniform(0,1);w=0.5;atoms=0:0.25,1:0.25
  return PayoffDistribution(Mixed{Uniform{0.0, 1.0}, 0.5, {0.0, 1.0}, {0.25, 0.25}});
}

std::vector<PayoffDistribution> all_kinds() {
  return {PayoffDistribution(Bernoulli{0.3}), three_point_uniform(),
          PayoffDistribution(Uniform{0.0, 1.0}), PayoffDistribution(Gaussian{0.0, 1.0}),
          mixed_example()};
}

}  // namespace

TEST_SUITE_BEGIN("dist");

TEST_CASE("cdf basics") {
  CHECK(PayoffDistribution(Bernoulli{0.3}).cdf(0.5) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(PayoffDistribution(Uniform{0.0, 1.0}).cdf(0.25) == doctest::Approx(0.25).epsilon(1e-15));
  // left limit excludes the atom at the point itself
  CHECK(three_point_uniform().cdf_left(1.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(three_point_uniform().cdf(1.0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
}

TEST_CASE("alpha and beta") {
  auto [a1, b1] = alpha_beta(PayoffDistribution(Bernoulli{0.5}));
  CHECK(a1 == 0.5);
  CHECK(b1 == 0.25);
  auto [a2, b2] = alpha_beta(PayoffDistribution(Uniform{0.0, 1.0}));
  CHECK(a2 == 0.0);
  CHECK(b2 == 0.5);
  auto [a3, b3] = alpha_beta(three_point_uniform());
  CHECK(a3 == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(b3 == doctest::Approx(1.0 / 3).epsilon(1e-15));
  for (const auto& d : all_kinds()) CHECK(d.alpha() + 2.0 * d.beta() == 1.0);  // exact identity
}

TEST_CASE("beta matches the exact double sum over a discrete support") {
  for (const auto& d : {three_point_uniform(), PayoffDistribution(Bernoulli{0.3})}) {
    double gt = 0.0;
    for (const auto& a : d.atom_set())
      for (const auto& b : d.atom_set())
        if (a.value > b.value) gt += a.mass * b.mass;
    CHECK(d.beta() == doctest::Approx(gt).epsilon(1e-14));
  }
}

TEST_CASE("mgf closed forms") {
  for (const auto& d : all_kinds()) CHECK(d.mgf(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(PayoffDistribution(Bernoulli{0.5}).mgf(std::log(2.0)) ==
        doctest::Approx(1.5).epsilon(1e-14));
  CHECK(PayoffDistribution(Uniform{0.0, 1.0}).mgf(1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(PayoffDistribution(Gaussian{0.0, 1.0}).mgf(2.0) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(PayoffDistribution(Bernoulli{0.5}).mgf(
                      std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("mgf against quadrature for the mixed kind") {
  const auto d = mixed_example();
  for (double t : {-2.0, -0.5, 0.7, 3.0}) {
    // int exp(ty) * 0.5 dy over [0,1] plus the atom terms
    const double cont = integrate([&](double y) { return 0.5 * std::exp(t * y); }, 0.0, 1.0).value;
    const double expected = cont + 0.25 + 0.25 * std::exp(t);
    CHECK(d.mgf(t) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("tilted mean is the log-mgf derivative") {
  for (const auto& d : all_kinds()) {
    for (double t : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
      const double h = 1e-5;
      const double numeric = (d.log_mgf(t + h) - d.log_mgf(t - h)) / (2.0 * h);
      CHECK(d.tilted_mean(t) == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("condition_on_max: Bernoulli(1/2) gives Bernoulli(2/3)") {
  const auto cond = condition_on_max(PayoffDistribution(Bernoulli{0.5}));
  REQUIRE(cond.atoms().size() == 2);
  CHECK(cond.atoms()[0].value == 0.0);
  CHECK(cond.atoms()[0].mass == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(cond.atoms()[1].mass == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(cond.mean() == doctest::Approx(2.0 / 3).epsilon(1e-14));
}

TEST_CASE("condition_on_max: uniform base has CDF y^2 and mean 2/3") {
  const auto cond = condition_on_max(PayoffDistribution(Uniform{0.0, 1.0}));
  for (double y : {0.1, 0.25, 0.5, 0.9}) CHECK(cond.cdf(y) == y * y);
  CHECK(cond.mean() == doctest::Approx(2.0 / 3).epsilon(1e-9));
}

TEST_CASE("condition_on_max: three-point masses match the 9-pair enumeration") {
  const auto d = three_point_uniform();
  // Oracle: enumerate the 9 equally likely (X, X') pairs and keep X >= X'.
  std::map<double, int> counts;
  int kept = 0;
  for (double x : {0.0, 1.0, 2.0})
    for (double xp : {0.0, 1.0, 2.0})
      if (x >= xp) {
        counts[x] += 1;
        kept += 1;
      }
  const auto cond = condition_on_max(d);
  REQUIRE(cond.atoms().size() == 3);
  for (const auto& a : cond.atoms())
    CHECK(a.mass == doctest::Approx(static_cast<double>(counts[a.value]) / kept).epsilon(1e-14));
  CHECK(cond.mean() == doctest::Approx(4.0 / 3).epsilon(1e-14));
}

TEST_CASE("condition_on_max: gaussian mean matches max-of-two-normals") {
  const auto cond = condition_on_max(PayoffDistribution(Gaussian{0.0, 1.0}));
  // E[max(X, X')] = 1/sqrt(pi) for two standard normals.
  CHECK(cond.mean() == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("condition_on_max: mixed example against precomputed values") {
  const auto cond = condition_on_max(mixed_example());
  // alpha = 2 * 0.25^2 = 0.125, atom masses m F(l) / (1 - beta).
  REQUIRE(cond.atoms().size() == 2);
  CHECK(cond.atoms()[0].mass == doctest::Approx(1.0 / 9).epsilon(1e-12));
  CHECK(cond.atoms()[1].mass == doctest::Approx(4.0 / 9).epsilon(1e-12));
  CHECK(cond.continuous_weight() == doctest::Approx(4.0 / 9).epsilon(1e-12));
  CHECK(cond.mean() == doctest::Approx(19.0 / 27).epsilon(1e-9));
  CHECK(cond.cdf(2.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("conditioned CDF is a CDF and matches F^2 when atomless") {
  for (const auto& d : all_kinds()) {
    const auto cond = condition_on_max(d);
    double prev = 0.0;
    for (int i = -40; i <= 40; ++i) {
      const double y = 0.1 * i;
      const double c = cond.cdf(y);
      CHECK(c >= prev - 1e-12);
      CHECK(c >= -1e-12);
      CHECK(c <= 1.0 + 1e-9);
      if (d.is_atomless()) CHECK(c == d.cdf(y) * d.cdf(y));
      prev = c;
    }
    CHECK(cond.cdf(1e9) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("conditioned CDF within the Monte Carlo band of simulated pairs") {
  std::mt19937_64 rng(20240817);
  for (const auto& d : all_kinds()) {
    const auto cond = condition_on_max(d);
    const int pairs = 1000000;
    std::vector<double> kept;
    kept.reserve(pairs / 2);
    for (int i = 0; i < pairs; ++i) {
      const double x = d.sample(rng);
      const double xp = d.sample(rng);
      if (x >= xp) kept.push_back(x);
    }
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double y = d.ess_inf() > -1e300 && d.ess_sup() < 1e300
                           ? d.ess_inf() + q * (d.ess_sup() - d.ess_inf())
                           : -2.0 + 4.0 * q;
      std::size_t below = 0;
      for (double v : kept)
        if (v <= y) ++below;
      const double emp = static_cast<double>(below) / kept.size();
      const double theo = cond.cdf(y);
      const double sigma = std::sqrt(std::max(theo * (1.0 - theo), 1e-12) / kept.size());
      CHECK(std::abs(emp - theo) <= 3.0 * sigma + 1e-9);
    }
  }
}

TEST_CASE("mgf domination: E[e^{tY}] <= 2 E[e^{tX}]") {
  for (const auto& d : all_kinds()) {
    const auto cond = condition_on_max(d);
    for (int t = -3; t <= 3; ++t)
      CHECK(cond.mgf(t) <= 2.0 * d.mgf(t) * (1.0 + 1e-9));
  }
}

TEST_CASE("sampling: degenerate and mean checks") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) CHECK(PayoffDistribution(Bernoulli{1.0}).sample(rng) == 1.0);
  for (int i = 0; i < 100; ++i) CHECK(PayoffDistribution(Bernoulli{0.0}).sample(rng) == 0.0);
  const auto half = PayoffDistribution(Bernoulli{0.5});
  double sum = 0.0;
  for (int i = 0; i < 1000000; ++i) sum += half.sample(rng);
  CHECK(std::abs(sum / 1e6 - 0.5) < 0.002);  // 3 sigma ~ 0.0015
}

TEST_CASE("discrete samples are exact atom values") {
  std::mt19937_64 rng(11);
  const auto d = three_point_uniform();
  for (int i = 0; i < 1000; ++i) {
    const double v = d.sample(rng);
    CHECK((v == 0.0 || v == 1.0 || v == 2.0));
  }
}

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(PayoffDistribution(Bernoulli{1.5}), std::invalid_argument);
  CHECK_THROWS_AS(PayoffDistribution(Uniform{1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PayoffDistribution(Gaussian{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PayoffDistribution(FiniteDiscrete{{0.0, 1.0}, {0.5, 0.4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PayoffDistribution(FiniteDiscrete{{1.0, 0.0}, {0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PayoffDistribution(Mixed{Uniform{0.0, 1.0}, 0.5, {0.0}, {0.4}}),
                  std::invalid_argument);
}

TEST_CASE("textual spec round-trips") {
  const std::vector<std::string> specs = {
      "bernoulli:p=0.5",
      "uniform:a=0,b=1",
      "gaussian:mu=0,sigma=1",
      "discrete:values=0,1,2;masses=0.3,0.3,0.4",
      "mixed:cont=uniform(0,1);w=0.5;atoms=0:0.25,1:0.25",
  };
  for (const auto& s : specs) {
    const auto d = parse_dist_spec(s);
    const std::string canon = dist_spec_string(d);
    const auto d2 = parse_dist_spec(canon);
    CHECK(dist_spec_string(d2) == canon);
    const auto d3 = dist_from_json(dist_to_json(d));
    CHECK(dist_spec_string(d3) == canon);
  }
}

TEST_CASE("malformed specs are rejected") {
  for (const std::string s :
       {"bernoulli", "bernoulli:q=0.5", "bernoulli:p=0.5,p=0.6", "uniform:a=1,b=0",
        "discrete:values=0,1;masses=0.5", "mixed:cont=beta(1,2);w=1", "weird:p=1", "p=0.5"})
    CHECK_THROWS_AS(parse_dist_spec(s), std::invalid_argument);
}

TEST_SUITE_END();
