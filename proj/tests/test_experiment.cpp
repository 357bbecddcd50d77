#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rgl/brute.hpp"
#include "rgl/experiment.hpp"
#include "rgl/figures.hpp"
#include "rgl/rng.hpp"

using namespace rgl;

namespace {

double binom_tail_geq(int n, double p, int kmin) {
  double tail = 0.0;
  for (int k = kmin; k <= n; ++k) {
    double c = 1.0;
    for (int j = 0; j < k; ++j) c = c * (n - j) / (j + 1);
    tail += c * std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  return tail;
}

std::string results_csv(const ExperimentResult& res) {
  std::ostringstream out;
  write_results_csv(res, out);
  return out.str();
}

std::string summary_json(const ExperimentResult& res) {
  std::ostringstream out;
  write_summary_json(res, out);
  return out.str();
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("seed derivation is frozen") {
  // These exact values are part of the results.csv reproducibility contract.
  CHECK(derive_seed(0, 1, 0) == derive_seed(0, 1, 0));
  CHECK(derive_seed(1, 12, 0) != derive_seed(1, 12, 1));
  CHECK(derive_seed(1, 12, 0) != derive_seed(1, 13, 0));
  CHECK(derive_seed(1, 12, 0) != derive_seed(2, 12, 0));
}

TEST_CASE("degenerate Bernoulli(1) cells") {
  ExperimentConfig cfg;
  cfg.dist = "bernoulli:p=1";
  cfg.ns = {3};
  cfg.reps = 5;
  const auto res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 5);
  for (const auto& row : res.rows) {
    CHECK(row.ne_count == 8);
    CHECK(row.so == 1.0);
    CHECK(*row.beq == 1.0);
    CHECK(*row.weq == 1.0);
  }
  CHECK(res.cells[0].ne_nonempty_freq == 1.0);
}

TEST_CASE("determinism: identical config, any worker count") {
  ExperimentConfig cfg;
  cfg.dist = "uniform:a=0,b=1";
  cfg.ns = {6, 8};
  cfg.reps = 50;
  cfg.master_seed = 31337;
  cfg.thresholds = {0.4, 0.6};
  cfg.epsilons = {0.1};
  cfg.workers = 1;
  const auto r1 = run_experiment(cfg);
  const auto r2 = run_experiment(cfg);
  cfg.workers = 4;
  const auto r4 = run_experiment(cfg);
  CHECK(results_csv(r1) == results_csv(r2));
  CHECK(results_csv(r1) == results_csv(r4));
  CHECK(summary_json(r1) == summary_json(r4));
}

TEST_CASE("mean neCount near (1+alpha)^n") {
  ExperimentConfig cfg;
  cfg.dist = "bernoulli:p=0.5";
  cfg.ns = {10};
  cfg.reps = 2000;
  cfg.master_seed = 4242;
  const auto res = run_experiment(cfg);
  const auto& cell = res.cells[0];
  const double target = std::pow(1.5, 10);  // 57.665
  CHECK(std::abs(cell.ne_count.mean - target) <= 4.0 * cell.ne_count.se);
}

TEST_CASE("empirical pmf sums to one") {
  ExperimentConfig cfg;
  cfg.dist = "uniform:a=0,b=1";
  cfg.ns = {8};
  cfg.reps = 500;
  cfg.master_seed = 7;
  const auto res = run_experiment(cfg);
  double total = res.cells[0].ne_pmf_tail;
  for (double v : res.cells[0].ne_pmf) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("poisson_check: contract and sanity") {
  ExperimentConfig cfg;
  cfg.dist = "uniform:a=0,b=1";
  cfg.ns = {10};
  cfg.reps = 2000;
  cfg.master_seed = 99;
  const auto res = run_experiment(cfg);
  const auto chk = poisson_check(res, 10);
  CHECK(chk.low_sample_warning);  // below 10^4 replications
  CHECK(chk.tv >= 0.0);
  CHECK(chk.tv < 0.25);  // loose sanity at this scale

  ExperimentConfig bad = cfg;
  bad.dist = "bernoulli:p=0.5";
  bad.ns = {6};
  const auto atom_res = run_experiment(bad);
  CHECK_THROWS_AS(poisson_check(atom_res, 6), std::invalid_argument);
  CHECK_THROWS_AS(poisson_check(res, 11), std::invalid_argument);  // no such cell
}

TEST_CASE("poisson_check: single replication still reports, flagged") {
  ExperimentConfig cfg;
  cfg.dist = "uniform:a=0,b=1";
  cfg.ns = {6};
  cfg.reps = 1;
  const auto res = run_experiment(cfg);
  const auto chk = poisson_check(res, 6);
  CHECK(chk.low_sample_warning);
  CHECK(chk.reps == 1);
}

TEST_CASE("growth_check: contract") {
  ExperimentConfig cfg;
  cfg.dist = "bernoulli:p=0.5";
  cfg.ns = {14};
  cfg.reps = 100;
  cfg.master_seed = 1;
  const auto res = run_experiment(cfg);
  const auto chk = growth_check(res, 14);
  CHECK(chk.target == doctest::Approx(std::log(1.5)).epsilon(1e-15));
  CHECK(std::abs(chk.mean_slope - chk.target) < 0.1);

  ExperimentConfig atomless = cfg;
  atomless.dist = "uniform:a=0,b=1";
  atomless.ns = {8};
  const auto ares = run_experiment(atomless);
  CHECK_THROWS_AS(growth_check(ares, 8), std::invalid_argument);
}

TEST_CASE("expected_z_exact: frozen Bernoulli values") {
  const PayoffDistribution half{Bernoulli{0.5}};
  CHECK(expected_z_exact(half, 2, 1.0, true) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(expected_z_exact(half, 2, 0.0, true) == doctest::Approx(2.25).epsilon(1e-13));
  CHECK(expected_z_exact(half, 10, 0.9, true) == doctest::Approx(6.0).epsilon(1e-12));
  // binomial-tail oracle, independent of the convolution
  for (double x : {0.3, 0.5, 0.75}) {
    const double expected =
        std::pow(1.5, 12) * binom_tail_geq(12, 2.0 / 3, min_count_at_least(12, x));
    CHECK(expected_z_exact(half, 12, x, true) == doctest::Approx(expected).epsilon(1e-12));
  }
  // upper and lower tails overlap exactly on the boundary atoms
  const double up = expected_z_exact(half, 5, 0.6, true);
  const double dn = expected_z_exact(half, 5, 0.6, false);
  const double boundary = expected_z_exact(half, 5, 0.6, true) +
                          expected_z_exact(half, 5, 0.5999, false) -
                          std::pow(1.5, 5);
  CHECK(up + dn >= std::pow(1.5, 5) - 1e-9);  // weak inequalities double-count atoms at x
  CHECK(boundary == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("expected_z_exact rejects continuous kinds and big n") {
  CHECK_THROWS_AS(expected_z_exact(PayoffDistribution(Uniform{0.0, 1.0}), 4, 0.5, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(expected_z_exact(PayoffDistribution(Bernoulli{0.5}), 21, 0.5, true),
                  std::invalid_argument);
}

TEST_CASE("lemma4_check: z-score within 4 at a standard cell") {
  ExperimentConfig cfg;
  cfg.dist = "bernoulli:p=0.5";
  cfg.ns = {8};
  cfg.reps = 4000;
  cfg.master_seed = 11;
  cfg.thresholds = {0.75};
  const auto res = run_experiment(cfg);
  const auto chk = lemma4_check(res, 8, 0.75, true);
  CHECK(std::abs(chk.z_score) <= 4.0);
  CHECK(chk.exact ==
        doctest::Approx(std::pow(1.5, 8) * binom_tail_geq(8, 2.0 / 3, min_count_at_least(8, 0.75)))
            .epsilon(1e-12));
  CHECK_THROWS_AS(lemma4_check(res, 8, 0.33, true), std::invalid_argument);
}

TEST_CASE("typ fraction mean within 4 SE of the exact per-equilibrium law") {
  // Each equilibrium's ASU is Bin(n, p-tilde)/n, so the expected fraction in
  // the strict window is an exact binomial sum: 0.641155 at n=12, eps=0.1.
  ExperimentConfig cfg;
  cfg.dist = "bernoulli:p=0.5";
  cfg.ns = {12};
  cfg.reps = 500;
  cfg.master_seed = 5;
  cfg.epsilons = {0.1};
  const auto res = run_experiment(cfg);
  const auto& frac = res.cells[0].typ_fraction[0];
  double expected = 0.0;
  for (int k = 0; k <= 12; ++k) {
    if (std::abs(k / 12.0 - res.x_typ) < 0.1) {
      double c = 1.0;
      for (int j = 0; j < k; ++j) c = c * (12 - j) / (j + 1);
      expected += c * std::pow(2.0 / 3, k) * std::pow(1.0 / 3, 12 - k);
    }
  }
  CHECK(expected == doctest::Approx(0.641155).epsilon(1e-4));
  CHECK(std::abs(frac.mean - expected) <= 4.0 * frac.se);
}

TEST_CASE("capacity failures are surfaced per cell, others still run") {
  ExperimentConfig cfg;
  cfg.dist = "uniform:a=0,b=1";
  cfg.ns = {4, 27};  // 27 is over the default double-payoff cap
  cfg.reps = 3;
  const auto res = run_experiment(cfg);
  REQUIRE(res.cells.size() == 2);
  CHECK(!res.cells[0].error);
  CHECK(res.cells[0].reps == 3);
  REQUIRE(res.cells[1].error);
  CHECK(res.rows.size() == 3);  // only the healthy cell produced rows
  const std::string summary = summary_json(res);
  CHECK(summary.find("error") != std::string::npos);
}

TEST_CASE("results csv shape") {
  ExperimentConfig cfg;
  cfg.dist = "bernoulli:p=0.5";
  cfg.ns = {4};
  cfg.reps = 2;
  cfg.thresholds = {0.5};
  cfg.epsilons = {0.1};
  const auto res = run_experiment(cfg);
  const std::string csv = results_csv(res);
  CHECK(csv.rfind("# config: {", 0) == 0);
  CHECK(csv.find("n,rep,seed,ne_count,so,beq,weq,typcount_0.1,wplus_0.5,wminus_0.5,zplus_0.5,"
                 "zminus_0.5\n") != std::string::npos);
  // one header comment + one header + one row per replication
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("brute force: exact small-n moments") {
  const std::vector<double> xs{0.0, 0.5, 1.0};
  const auto b1 = brute_force_expectations(1, 0.5, xs);
  CHECK(b1.e_ne == doctest::Approx(1.5).epsilon(1e-14));
  const auto b2 = brute_force_expectations(2, 0.5, xs);
  CHECK(b2.e_ne == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(b2.z[2].e_plus == doctest::Approx(1.0).epsilon(1e-14));  // x = 1
  CHECK(b2.z[0].e_plus == doctest::Approx(2.25).epsilon(1e-14));  // x = 0, whole space
  // matches the convolution-based first moment for a biased p as well
  const auto b3 = brute_force_expectations(2, 0.3, xs);
  const PayoffDistribution d03{Bernoulli{0.3}};
  CHECK(b3.e_ne == doctest::Approx(std::pow(1.58, 2)).epsilon(1e-13));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    CHECK(b3.z[j].e_plus == doctest::Approx(expected_z_exact(d03, 2, xs[j], true)).epsilon(1e-12));
    CHECK(b3.z[j].e_minus ==
          doctest::Approx(expected_z_exact(d03, 2, xs[j], false)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(brute_force_expectations(4, 0.5, xs), std::invalid_argument);
}

TEST_CASE("brute force: n=3 second-moment ratio is finite and at least one") {
  const std::vector<double> xs{2.0 / 3};
  const auto b = brute_force_expectations(3, 0.5, xs);
  CHECK(b.e_ne == doctest::Approx(std::pow(1.5, 3)).epsilon(1e-12));
  CHECK(b.z[0].ratio_plus >= 1.0);
  CHECK(std::isfinite(b.z[0].ratio_plus));
  CHECK(b.z[0].var_plus >= 0.0);
}

TEST_CASE("figure data emitters") {
  const std::vector<double> pg{0.2, 0.5, 0.6, 0.7, 0.8};
  const auto rows = figure1_data(pg);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1].x_opt == 1.0);
  CHECK(rows[1].x_beq == 1.0);
  CHECK(rows[1].x_weq == doctest::Approx(0.2271).epsilon(1e-3));
  CHECK(rows[1].x_typ == doctest::Approx(2.0 / 3).epsilon(1e-12));
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(rows[i].x_opt == 1.0);
    CHECK(rows[i].x_beq == 1.0);
  }
  CHECK_THROWS_AS(figure1_data(std::vector<double>{0.0, 0.5}), std::invalid_argument);

  const std::vector<double> xg{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto fig2 = figure2_data(0.5, xg);
  CHECK(fig2.level_log2 == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(fig2.level_log1alpha == doctest::Approx(std::log(1.5)).epsilon(1e-15));
  REQUIRE(fig2.rows.size() == 5);
  CHECK(fig2.rows[2].h_p == 0.0);  // H_p at its minimum
  CHECK_THROWS_AS(figure2_data(0.5, std::vector<double>{-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(figure2_data(1.0, xg), std::invalid_argument);
}

TEST_SUITE_END();
