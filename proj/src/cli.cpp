#include "rgl/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgl/brute.hpp"
#include "rgl/dist_spec.hpp"
#include "rgl/experiment.hpp"
#include "rgl/figures.hpp"
#include "rgl/format.hpp"
#include "rgl/thresholds.hpp"

namespace rgl {
namespace {

using json = nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;

std::vector<double> parse_grid(const std::string& spec) {
  // Either "lo:hi:count" or a comma-separated list.
  const auto colons = std::count(spec.begin(), spec.end(), ':');
  std::vector<double> out;
  if (colons == 2) {
    double lo, hi;
    int count;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 ||
        !(in >> std::ws).eof())
      throw std::invalid_argument("bad grid '" + spec + "': expected lo:hi:count");
    if (count == 1) {
      out.push_back(lo);
      return out;
    }
    for (int i = 0; i < count; ++i)
      out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    return out;
  }
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad grid entry '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty grid '" + spec + "'");
  return out;
}

std::vector<int> parse_n_range(const std::string& spec) {
  int lo, hi, step = 1;
  char c1, c2;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi) || c1 != ':')
    throw std::invalid_argument("bad n-range '" + spec + "': expected lo:hi[:step]");
  if (in >> c2) {
    if (c2 != ':' || !(in >> step) || step < 1)
      throw std::invalid_argument("bad n-range '" + spec + "': expected lo:hi[:step]");
  }
  if (lo > hi) throw std::invalid_argument("bad n-range '" + spec + "': lo > hi");
  std::vector<int> out;
  for (int n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

MemoryPolicy memory_policy(const std::optional<std::uint64_t>& flag_cap) {
  MemoryPolicy mem;
  if (flag_cap) {
    mem.cap_bytes = *flag_cap;
  } else if (const char* env = std::getenv("RGL_MEM_CAP_BYTES")) {
    mem.cap_bytes = std::strtoull(env, nullptr, 10);
  }
  return mem;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
  return out;
}

void emit_theory(const PayoffDistribution& dist, std::ostream& out) {
  const TheoryResult t = theory_limits(dist);
  auto num = [](double v) { return format_double_12(v); };
  out << "{\n";
  out << "  \"config\": {\"dist\": \"" << dist_spec_string(dist) << "\"},\n";
  out << "  \"dist\": " << dist_to_json(dist).dump() << ",\n";
  out << "  \"alpha\": " << num(t.alpha) << ",\n";
  out << "  \"beta\": " << num(t.beta) << ",\n";
  out << "  \"x_typ\": " << num(t.x_typ) << ",\n";
  out << "  \"x_opt\": " << num(t.x_opt) << ",\n";
  out << "  \"x_beq\": " << num(t.x_beq) << ",\n";
  out << "  \"x_weq\": " << num(t.x_weq) << ",\n";
  out << "  \"regime\": \"" << (t.atomless ? "atomless" : "atoms") << "\",\n";
  // Price ratios presume positive equilibrium utility; an x_weq (x_beq) of
  // zero is reported as infinite rather than a synthetic number.
  if (t.x_weq > 0.0)
    out << "  \"poa\": " << num(t.x_opt / t.x_weq) << ",\n";
  else
    out << "  \"poa\": \"infinite\",\n";
  if (t.x_beq > 0.0)
    out << "  \"pos\": " << num(t.x_opt / t.x_beq) << "\n";
  else
    out << "  \"pos\": \"infinite\"\n";
  out << "}\n";
}

void write_experiment_files(const ExperimentResult& res, const std::string& out_dir,
                            const std::string& results_name, const std::string& summary_name) {
  auto results = open_out(out_dir + "/" + results_name);
  write_results_csv(res, results);
  auto summary = open_out(out_dir + "/" + summary_name);
  write_summary_json(res, summary);
}

int run(int argc, const char* const* argv) {
  CLI::App app{"limit theory and simulation for random n-player binary-action games"};
  app.require_subcommand(1);

  std::string dist_spec;
  std::optional<std::uint64_t> mem_cap;

  // theory
  auto* theory = app.add_subcommand("theory", "limit quantities for a payoff distribution");
  theory->add_option("--dist", dist_spec, "distribution spec, e.g. bernoulli:p=0.5")->required();
  std::string theory_out;
  theory->add_option("--out", theory_out, "write JSON here instead of stdout");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo over random games");
  std::vector<int> sim_ns;
  std::uint64_t reps = 100, seed = 0;
  std::vector<double> thresholds, epsilons{0.1};
  int workers = 1;
  std::string out_dir = ".";
  simulate->add_option("--dist", dist_spec)->required();
  simulate->add_option("--n", sim_ns, "player counts")->required()->delimiter(',');
  simulate->add_option("--reps", reps, "replications per n");
  simulate->add_option("--seed", seed, "master seed");
  simulate->add_option("--thresholds", thresholds, "ASU thresholds x for W/Z counters")
      ->delimiter(',');
  simulate->add_option("--eps", epsilons, "epsilons for |ASU - x_typ| < eps counters")
      ->delimiter(',');
  simulate->add_option("--workers", workers, "worker threads");
  simulate->add_option("--mem-cap", mem_cap, "payoff table byte budget");
  simulate->add_option("--out-dir", out_dir, "directory for results.csv and summary.json");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "simulate over an n range and/or a Bernoulli p grid");
  std::string n_range, p_grid_spec;
  sweep->add_option("--dist", dist_spec, "distribution (ignored when --p-grid is given)");
  sweep->add_option("--n-range", n_range, "lo:hi[:step]");
  sweep->add_option("--n", sim_ns, "explicit player counts")->delimiter(',');
  sweep->add_option("--p-grid", p_grid_spec, "Bernoulli p grid, lo:hi:count or list");
  sweep->add_option("--reps", reps);
  sweep->add_option("--seed", seed);
  sweep->add_option("--thresholds", thresholds)->delimiter(',');
  sweep->add_option("--eps", epsilons)->delimiter(',');
  sweep->add_option("--workers", workers);
  sweep->add_option("--mem-cap", mem_cap);
  sweep->add_option("--out-dir", out_dir);

  // figures
  auto* figures = app.add_subcommand("figures", "figure data tables");
  int which = 1;
  double fig_p = 0.5;
  std::string fig_p_grid = "0.005:0.995:199";
  std::string fig_x_grid = "0:1:1001";
  std::string fig_out;
  figures->add_option("--which", which, "1: thresholds over p; 2: entropy curves")
      ->check(CLI::IsMember({1, 2}));
  figures->add_option("--p", fig_p, "Bernoulli p (figure 2)");
  figures->add_option("--p-grid", fig_p_grid, "p grid (figure 1)");
  figures->add_option("--x-grid", fig_x_grid, "x grid (figure 2)");
  figures->add_option("--out", fig_out, "output CSV (default figure<which>.csv)");

  // brute
  auto* brute = app.add_subcommand("brute", "exact moments by exhaustive table enumeration");
  double brute_p = 0.5;
  int brute_n = 2;
  std::vector<double> brute_xs{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string brute_out;
  brute->add_option("--p", brute_p, "Bernoulli p")->required();
  brute->add_option("--n", brute_n, "players (n * 2^n <= 24)")->required();
  brute->add_option("--x", brute_xs, "thresholds")->delimiter(',');
  brute->add_option("--out", brute_out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? 0 : kExitValidation;
  }

  if (theory->parsed()) {
    const PayoffDistribution dist = parse_dist_spec(dist_spec);
    if (!theory_out.empty()) {
      auto out = open_out(theory_out);
      emit_theory(dist, out);
    } else {
      emit_theory(dist, std::cout);
    }
    return 0;
  }

  if (simulate->parsed()) {
    ExperimentConfig cfg;
    cfg.dist = dist_spec;
    cfg.ns = sim_ns;
    cfg.reps = reps;
    cfg.master_seed = seed;
    cfg.thresholds = thresholds;
    cfg.epsilons = epsilons;
    cfg.workers = workers;
    cfg.mem = memory_policy(mem_cap);
    const ExperimentResult res = run_experiment(cfg);
    write_experiment_files(res, out_dir, "results.csv", "summary.json");
    return 0;
  }

  if (sweep->parsed()) {
    std::vector<int> ns = sim_ns;
    if (!n_range.empty()) {
      const auto range = parse_n_range(n_range);
      ns.insert(ns.end(), range.begin(), range.end());
    }
    if (ns.empty()) throw std::invalid_argument("sweep: need --n or --n-range");

    std::vector<std::string> dists;
    std::vector<std::string> labels;
    if (!p_grid_spec.empty()) {
      for (double p : parse_grid(p_grid_spec)) {
        dists.push_back("bernoulli:p=" + format_double(p));
        labels.push_back("p" + format_double(p));
      }
    } else {
      if (dist_spec.empty()) throw std::invalid_argument("sweep: need --dist or --p-grid");
      dists.push_back(dist_spec);
      labels.push_back("");
    }

    json index;
    index["cells"] = json::array();
    for (std::size_t i = 0; i < dists.size(); ++i) {
      ExperimentConfig cfg;
      cfg.dist = dists[i];
      cfg.ns = ns;
      cfg.reps = reps;
      cfg.master_seed = seed;
      cfg.thresholds = thresholds;
      cfg.epsilons = epsilons;
      cfg.workers = workers;
      cfg.mem = memory_policy(mem_cap);
      const ExperimentResult res = run_experiment(cfg);
      const std::string suffix = labels[i].empty() ? "" : "_" + labels[i];
      write_experiment_files(res, out_dir, "results" + suffix + ".csv",
                             "summary" + suffix + ".json");
      json entry;
      entry["dist"] = res.config.dist;
      entry["results"] = "results" + suffix + ".csv";
      entry["summary"] = "summary" + suffix + ".json";
      index["cells"].push_back(std::move(entry));
    }
    auto out = open_out(out_dir + "/sweep_summary.json");
    out << index.dump(2) << "\n";
    return 0;
  }

  if (figures->parsed()) {
    const std::string path = fig_out.empty() ? "figure" + std::to_string(which) + ".csv" : fig_out;
    auto out = open_out(path);
    if (which == 1) {
      const auto grid = parse_grid(fig_p_grid);
      out << "# config: {\"which\":1,\"p_grid\":\"" << fig_p_grid << "\"}\n";
      const auto rows = figure1_data(grid);
      write_figure1_csv(rows, out);
    } else {
      const auto grid = parse_grid(fig_x_grid);
      out << "# config: {\"which\":2,\"p\":" << format_double(fig_p) << ",\"x_grid\":\""
          << fig_x_grid << "\"}\n";
      write_figure2_csv(figure2_data(fig_p, grid), out);
    }
    return 0;
  }

  // brute
  const BruteForceResult bf = brute_force_expectations(brute_n, brute_p, brute_xs);
  json j;
  j["config"] = {{"p", bf.p}, {"n", bf.n}, {"x", brute_xs}};
  j["alpha"] = bf.alpha;
  j["p_tilde"] = bf.p_tilde;
  j["e_ne"] = bf.e_ne;
  j["e_ne_first_moment"] = std::pow(1.0 + bf.alpha, bf.n);
  json zs = json::array();
  const PayoffDistribution dist{Bernoulli{bf.p}};
  for (const auto& z : bf.z) {
    json e;
    e["x"] = z.x;
    e["e_z_plus"] = z.e_plus;
    e["e_z_plus_first_moment"] = expected_z_exact(dist, bf.n, z.x, true);
    e["e_z_plus_sq"] = z.e_plus_sq;
    e["var_z_plus"] = z.var_plus;
    e["second_moment_ratio"] = z.ratio_plus;
    e["e_z_minus"] = z.e_minus;
    e["e_z_minus_first_moment"] = expected_z_exact(dist, bf.n, z.x, false);
    zs.push_back(std::move(e));
  }
  j["z"] = std::move(zs);
  if (!brute_out.empty()) {
    auto out = open_out(brute_out);
    out << j.dump(2) << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  try {
    return run(argc, argv);
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rgl
