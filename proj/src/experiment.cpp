#include "rgl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "rgl/dist_spec.hpp"
#include "rgl/format.hpp"
#include "rgl/rng.hpp"

namespace rgl {
namespace {

using json = nlohmann::ordered_json;

constexpr int kPmfCut = 10;  // neCount pmf support kept for the Poisson comparison

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe m;
  m.count = xs.size();
  if (xs.empty()) {
    m.mean = std::numeric_limits<double>::quiet_NaN();
    m.se = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double sum = 0.0;
  for (double v : xs) sum += v;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    m.se = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double ss = 0.0;
  for (double v : xs) ss += (v - m.mean) * (v - m.mean);
  m.se = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) / static_cast<double>(xs.size()));
  return m;
}

CellAggregate aggregate_cell(int n, const ExperimentConfig& cfg,
                             std::span<const ReplicationRow> rows) {
  CellAggregate cell;
  cell.n = n;
  cell.reps = rows.size();
  cell.ne_pmf.assign(kPmfCut + 1, 0.0);

  std::vector<double> ne_counts, sos, beqs, weqs, slopes;
  std::vector<std::vector<double>> wp(cfg.thresholds.size()), wm(cfg.thresholds.size()),
      zp(cfg.thresholds.size()), zm(cfg.thresholds.size());
  std::vector<std::vector<double>> typ(cfg.epsilons.size());

  for (const auto& row : rows) {
    ne_counts.push_back(static_cast<double>(row.ne_count));
    sos.push_back(row.so);
    if (row.ne_count <= kPmfCut)
      cell.ne_pmf[row.ne_count] += 1.0;
    else
      cell.ne_pmf_tail += 1.0;
    if (row.ne_count >= 1) {
      beqs.push_back(*row.beq);
      weqs.push_back(*row.weq);
      slopes.push_back(std::log(static_cast<double>(row.ne_count)) / n);
      for (std::size_t j = 0; j < cfg.epsilons.size(); ++j)
        typ[j].push_back(static_cast<double>(row.typ_counts[j]) /
                         static_cast<double>(row.ne_count));
    }
    for (std::size_t j = 0; j < cfg.thresholds.size(); ++j) {
      wp[j].push_back(static_cast<double>(row.thresholds[j].w_plus));
      wm[j].push_back(static_cast<double>(row.thresholds[j].w_minus));
      zp[j].push_back(static_cast<double>(row.thresholds[j].z_plus));
      zm[j].push_back(static_cast<double>(row.thresholds[j].z_minus));
    }
  }
  const double r = static_cast<double>(rows.size());
  if (r > 0) {
    for (auto& v : cell.ne_pmf) v /= r;
    cell.ne_pmf_tail /= r;
    cell.ne_nonempty_freq = static_cast<double>(beqs.size()) / r;
  }
  cell.ne_count = mean_se(ne_counts);
  cell.so = mean_se(sos);
  cell.beq = mean_se(beqs);
  cell.weq = mean_se(weqs);
  cell.log_ne_over_n = mean_se(slopes);
  for (std::size_t j = 0; j < cfg.thresholds.size(); ++j) {
    cell.w_plus.push_back(mean_se(wp[j]));
    cell.w_minus.push_back(mean_se(wm[j]));
    cell.z_plus.push_back(mean_se(zp[j]));
    cell.z_minus.push_back(mean_se(zm[j]));
  }
  for (std::size_t j = 0; j < cfg.epsilons.size(); ++j)
    cell.typ_fraction.push_back(mean_se(typ[j]));
  return cell;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.ns.empty()) throw std::invalid_argument("experiment: need at least one n");
  if (cfg.reps < 1) throw std::invalid_argument("experiment: reps must be >= 1");
  if (cfg.workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw std::invalid_argument("experiment: epsilons must be positive");
  for (double x : cfg.thresholds)
    if (!std::isfinite(x)) throw std::invalid_argument("experiment: thresholds must be finite");
}

json mean_se_json(const MeanSe& m) {
  json j;
  j["mean"] = std::isfinite(m.mean) ? json(m.mean) : json(nullptr);
  j["se"] = std::isfinite(m.se) ? json(m.se) : json(nullptr);
  j["count"] = m.count;
  return j;
}

// The semantic inputs only. Worker count is deliberately absent: outputs
// are worker-count invariant and must stay byte-identical across pools.
json config_json(const ExperimentConfig& cfg) {
  json j;
  j["dist"] = cfg.dist;
  j["ns"] = cfg.ns;
  j["reps"] = cfg.reps;
  j["seed"] = cfg.master_seed;
  j["thresholds"] = cfg.thresholds;
  j["epsilons"] = cfg.epsilons;
  if (cfg.mem.cap_bytes)
    j["mem_cap_bytes"] = *cfg.mem.cap_bytes;
  else
    j["mem_cap_bytes"] = nullptr;
  return j;
}

json theory_json(const TheoryResult& t) {
  json j;
  j["alpha"] = t.alpha;
  j["beta"] = t.beta;
  j["x_typ"] = t.x_typ;
  j["x_opt"] = t.x_opt;
  j["x_beq"] = t.x_beq;
  j["x_weq"] = t.x_weq;
  j["regime"] = t.atomless ? "atomless" : "atoms";
  return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const PayoffDistribution dist = parse_dist_spec(config.dist);

  ExperimentResult res;
  res.config = config;
  res.config.dist = dist_spec_string(dist);
  res.theory = theory_limits(dist);
  res.x_typ = res.theory.x_typ;

  // Cells over budget are recorded as failed and skipped, never silently.
  std::vector<std::optional<std::string>> cell_errors(config.ns.size());
  struct Item {
    std::size_t cell;
    std::uint64_t rep;
    std::size_t slot;
  };
  std::vector<Item> items;
  std::vector<std::size_t> cell_row_start(config.ns.size());
  std::size_t slot = 0;
  for (std::size_t c = 0; c < config.ns.size(); ++c) {
    cell_row_start[c] = slot;
    try {
      ensure_capacity(config.ns[c], dist, config.mem);
    } catch (const CapacityError& e) {
      cell_errors[c] = e.what();
      continue;
    }
    for (std::uint64_t rep = 0; rep < config.reps; ++rep)
      items.push_back({c, rep, slot++});
  }

  std::vector<ReplicationRow> rows(slot);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_items = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= items.size()) return;
      const Item& it = items[idx];
      try {
        const int n = config.ns[it.cell];
        ReplicationRow row;
        row.n = n;
        row.rep = it.rep;
        row.seed = derive_seed(config.master_seed, n, it.rep);
        const Game game = Game::generate(n, dist, row.seed, config.mem);
        EquilibriumReport rep =
            game.report(config.thresholds, config.epsilons, res.x_typ);
        row.ne_count = rep.ne_count;
        row.so = rep.so;
        row.beq = rep.beq;
        row.weq = rep.weq;
        row.typ_counts = std::move(rep.typ_counts);
        row.thresholds = std::move(rep.thresholds);
        rows[it.slot] = std::move(row);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int workers =
      static_cast<int>(std::min<std::size_t>(config.workers, std::max<std::size_t>(items.size(), 1)));
  if (workers <= 1) {
    run_items();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_items);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  res.rows = std::move(rows);
  for (std::size_t c = 0; c < config.ns.size(); ++c) {
    if (cell_errors[c]) {
      CellAggregate cell;
      cell.n = config.ns[c];
      cell.reps = 0;
      cell.error = cell_errors[c];
      res.cells.push_back(std::move(cell));
      continue;
    }
    res.cells.push_back(aggregate_cell(
        config.ns[c], res.config,
        std::span<const ReplicationRow>(res.rows.data() + cell_row_start[c], config.reps)));
  }
  return res;
}

void write_results_csv(const ExperimentResult& res, std::ostream& out) {
  out << "# config: " << config_json(res.config).dump() << "\n";
  out << "n,rep,seed,ne_count,so,beq,weq";
  for (double e : res.config.epsilons) out << ",typcount_" << format_double(e);
  for (double x : res.config.thresholds) {
    const std::string sx = format_double(x);
    out << ",wplus_" << sx << ",wminus_" << sx << ",zplus_" << sx << ",zminus_" << sx;
  }
  out << "\n";
  for (const auto& row : res.rows) {
    out << row.n << ',' << row.rep << ',' << row.seed << ',' << row.ne_count << ','
        << format_double(row.so) << ',';
    if (row.beq) out << format_double(*row.beq);
    out << ',';
    if (row.weq) out << format_double(*row.weq);
    for (std::uint64_t t : row.typ_counts) out << ',' << t;
    for (const auto& tc : row.thresholds)
      out << ',' << tc.w_plus << ',' << tc.w_minus << ',' << tc.z_plus << ',' << tc.z_minus;
    out << "\n";
  }
}

void write_summary_json(const ExperimentResult& res, std::ostream& out) {
  json j;
  j["config"] = config_json(res.config);
  j["theory"] = theory_json(res.theory);
  // The theory block states limits; all finite-n comparisons against it use
  // tolerances calibrated for this artifact, not values from the limits.
  j["finite_n_tolerances_are_calibrations"] = true;
  json cells = json::array();
  for (const auto& cell : res.cells) {
    json c;
    c["n"] = cell.n;
    c["reps"] = cell.reps;
    if (cell.error) {
      c["error"] = *cell.error;
      cells.push_back(std::move(c));
      continue;
    }
    c["ne_count"] = mean_se_json(cell.ne_count);
    c["ne_pmf"] = cell.ne_pmf;
    c["ne_pmf_tail"] = cell.ne_pmf_tail;
    c["ne_nonempty_freq"] = cell.ne_nonempty_freq;
    c["so"] = mean_se_json(cell.so);
    c["beq_conditional"] = mean_se_json(cell.beq);
    c["weq_conditional"] = mean_se_json(cell.weq);
    c["log_ne_over_n_conditional"] = mean_se_json(cell.log_ne_over_n);
    json th = json::array();
    for (std::size_t jx = 0; jx < res.config.thresholds.size(); ++jx) {
      json t;
      t["x"] = res.config.thresholds[jx];
      t["w_plus"] = mean_se_json(cell.w_plus[jx]);
      t["w_minus"] = mean_se_json(cell.w_minus[jx]);
      t["z_plus"] = mean_se_json(cell.z_plus[jx]);
      t["z_minus"] = mean_se_json(cell.z_minus[jx]);
      th.push_back(std::move(t));
    }
    c["thresholds"] = std::move(th);
    json tf = json::array();
    for (std::size_t je = 0; je < res.config.epsilons.size(); ++je) {
      json t;
      t["epsilon"] = res.config.epsilons[je];
      t["fraction_conditional"] = mean_se_json(cell.typ_fraction[je]);
      tf.push_back(std::move(t));
    }
    c["typ_fraction"] = std::move(tf);
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  out << j.dump(2) << "\n";
}

namespace {

const CellAggregate& find_cell(const ExperimentResult& res, int n) {
  for (const auto& cell : res.cells)
    if (cell.n == n) {
      if (cell.error) throw std::invalid_argument("cell n=" + std::to_string(n) + " failed: " +
                                                  *cell.error);
      return cell;
    }
  throw std::invalid_argument("no cell with n=" + std::to_string(n));
}

}  // namespace

PoissonCheckResult poisson_check(const ExperimentResult& res, int n) {
  if (res.theory.alpha > 0.0)
    throw std::invalid_argument("poisson_check: requires an atomless distribution");
  const CellAggregate& cell = find_cell(res, n);
  PoissonCheckResult out;
  out.n = n;
  out.reps = cell.reps;
  out.low_sample_warning = cell.reps < 10000;
  double poisson_mass = std::exp(-1.0);
  double tail = 1.0;
  double tv = 0.0;
  for (int k = 0; k <= kPmfCut; ++k) {
    tv += std::abs(cell.ne_pmf[k] - poisson_mass);
    tail -= poisson_mass;
    poisson_mass /= (k + 1);
  }
  out.poisson_tail = std::max(0.0, tail);
  out.emp_tail = cell.ne_pmf_tail;
  tv += std::abs(out.emp_tail - out.poisson_tail);
  out.tv = 0.5 * tv;
  return out;
}

GrowthCheckResult growth_check(const ExperimentResult& res, int n) {
  if (res.theory.alpha == 0.0)
    throw std::invalid_argument("growth_check: requires a distribution with atoms");
  const CellAggregate& cell = find_cell(res, n);
  GrowthCheckResult out;
  out.n = n;
  out.conditioning_count = cell.log_ne_over_n.count;
  out.mean_slope = cell.log_ne_over_n.mean;
  out.se = cell.log_ne_over_n.se;
  out.target = std::log1p(res.theory.alpha);
  return out;
}

double expected_z_exact(const PayoffDistribution& d, int n, double x, bool upper) {
  if (!d.is_discrete())
    throw std::invalid_argument("expected_z_exact: exact side needs a discrete distribution");
  if (n < 1 || n > 20) throw std::invalid_argument("expected_z_exact: n must lie in [1, 20]");
  const ConditionedDistribution cond = condition_on_max(d);

  // n-fold convolution of the conditioned atoms over exact sums.
  std::map<double, double> sums{{0.0, 1.0}};
  for (int i = 0; i < n; ++i) {
    std::map<double, double> nxt;
    for (const auto& [s, m] : sums)
      for (const auto& a : cond.atoms()) nxt[s + a.value] += m * a.mass;
    if (nxt.size() > 2000000)
      throw std::invalid_argument("expected_z_exact: support too large to convolve");
    sums = std::move(nxt);
  }
  double tail = 0.0;
  for (const auto& [s, m] : sums) {
    const double asu = s / n;
    if (upper ? asu >= x : asu <= x) tail += m;
  }
  return std::pow(1.0 + d.alpha(), n) * tail;
}

Lemma4Result lemma4_check(const ExperimentResult& res, int n, double x, bool upper) {
  const CellAggregate& cell = find_cell(res, n);
  std::size_t idx = res.config.thresholds.size();
  for (std::size_t j = 0; j < res.config.thresholds.size(); ++j)
    if (res.config.thresholds[j] == x) idx = j;
  if (idx == res.config.thresholds.size())
    throw std::invalid_argument("lemma4_check: x is not one of the configured thresholds");

  Lemma4Result out;
  out.exact = expected_z_exact(parse_dist_spec(res.config.dist), n, x, upper);
  out.mc = upper ? cell.z_plus[idx] : cell.z_minus[idx];
  if (out.mc.se > 0.0)
    out.z_score = (out.mc.mean - out.exact) / out.mc.se;
  else
    out.z_score = (out.mc.mean == out.exact) ? 0.0 : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace rgl
