#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rgl/distribution.hpp"
#include "rgl/game.hpp"
#include "rgl/thresholds.hpp"

namespace rgl {

struct ExperimentConfig {
  std::string dist;  // textual spec; canonicalized into the result
  std::vector<int> ns;
  std::uint64_t reps = 1;
  std::uint64_t master_seed = 0;
  std::vector<double> thresholds;
  std::vector<double> epsilons{0.1};
  int workers = 1;
  MemoryPolicy mem;
};

struct ReplicationRow {
  int n = 0;
  std::uint64_t rep = 0;
  std::uint64_t seed = 0;
  std::uint64_t ne_count = 0;
  double so = 0.0;
  std::optional<double> beq;
  std::optional<double> weq;
  std::vector<std::uint64_t> typ_counts;
  std::vector<ThresholdCounts> thresholds;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t count = 0;  // population size behind the mean
};

// Aggregates for one n. Conditional statistics (beq, weq, log|NE|/n, the
// typ fraction) are over replications with at least one equilibrium; the
// conditioning frequency is ne_nonempty_freq.
struct CellAggregate {
  int n = 0;
  std::uint64_t reps = 0;
  std::optional<std::string> error;  // capacity failure, cell skipped
  std::vector<double> ne_pmf;        // k = 0..10
  double ne_pmf_tail = 0.0;          // lumped mass at ne_count > 10
  MeanSe ne_count;
  MeanSe so;
  MeanSe beq;
  MeanSe weq;
  MeanSe log_ne_over_n;
  double ne_nonempty_freq = 0.0;
  std::vector<MeanSe> w_plus, w_minus, z_plus, z_minus;  // per threshold
  std::vector<MeanSe> typ_fraction;                      // per epsilon
};

struct ExperimentResult {
  ExperimentConfig config;  // resolved: canonical dist string
  TheoryResult theory;
  double x_typ = 0.0;
  std::vector<ReplicationRow> rows;  // (n, rep) in config order
  std::vector<CellAggregate> cells;
};

// M independent games per n, each seeded with derive_seed(master, n, rep).
// Deterministic for a given config at any worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_results_csv(const ExperimentResult& res, std::ostream& out);
void write_summary_json(const ExperimentResult& res, std::ostream& out);

struct PoissonCheckResult {
  int n = 0;
  std::uint64_t reps = 0;
  double tv = 0.0;  // total variation vs Poisson(1) on k = 0..10 plus lumped tail
  double emp_tail = 0.0;
  double poisson_tail = 0.0;
  bool low_sample_warning = false;  // reps below 10^4
};

// Atomless cells only; rejects alpha > 0.
PoissonCheckResult poisson_check(const ExperimentResult& res, int n);

struct GrowthCheckResult {
  int n = 0;
  std::uint64_t conditioning_count = 0;
  double mean_slope = 0.0;  // mean of log|NE| / n over nonempty replications
  double se = 0.0;
  double target = 0.0;  // log(1 + alpha)
};

// Atom cells only; rejects alpha == 0.
GrowthCheckResult growth_check(const ExperimentResult& res, int n);

// Exact E|Z^+_x| (upper) or E|Z^-_x| via the n-fold convolution of the
// conditioned atom masses: (1+alpha)^n * P(mean of n draws from F-tilde
// against x). Discrete distributions only, n <= 20.
double expected_z_exact(const PayoffDistribution& d, int n, double x, bool upper);

struct Lemma4Result {
  double exact = 0.0;
  MeanSe mc;
  double z_score = 0.0;
};

// Agreement between the exact first moment and the Monte Carlo mean of the
// matching threshold counter; x must be one of the config's thresholds.
Lemma4Result lemma4_check(const ExperimentResult& res, int n, double x, bool upper = true);

}  // namespace rgl
