#include "rgl/figures.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rgl/format.hpp"
#include "rgl/rate.hpp"
#include "rgl/thresholds.hpp"

namespace rgl {

std::vector<Figure1Row> figure1_data(std::span<const double> p_grid) {
  std::vector<Figure1Row> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("figure1: p grid must lie strictly inside (0,1)");
    const BernoulliLimits b = bernoulli_limits(p);
    rows.push_back({p, b.x_opt, b.x_beq, b.x_weq, b.x_typ});
  }
  return rows;
}

Figure2Data figure2_data(double p, std::span<const double> x_grid) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("figure2: p must lie in (0,1)");
  const BernoulliLimits b = bernoulli_limits(p);
  Figure2Data data;
  data.p = p;
  data.level_log2 = std::log(2.0);
  data.level_log1alpha = std::log1p(b.alpha);
  data.rows.reserve(x_grid.size());
  for (double x : x_grid) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("figure2: x grid must lie in [0,1]");
    data.rows.push_back({x, entropy(p, x), entropy(b.p_tilde, x)});
  }
  return data;
}

void write_figure1_csv(std::span<const Figure1Row> rows, std::ostream& out) {
  out << "p,x_opt,x_beq,x_weq,x_typ\n";
  for (const auto& r : rows)
    out << format_double(r.p) << ',' << format_double(r.x_opt) << ',' << format_double(r.x_beq)
        << ',' << format_double(r.x_weq) << ',' << format_double(r.x_typ) << "\n";
}

void write_figure2_csv(const Figure2Data& data, std::ostream& out) {
  out << "# p=" << format_double(data.p) << "\n";
  out << "x,h_p,h_ptilde,level_log2,level_log1alpha\n";
  for (const auto& r : data.rows)
    out << format_double(r.x) << ',' << format_double(r.h_p) << ',' << format_double(r.h_ptilde)
        << ',' << format_double(data.level_log2) << ',' << format_double(data.level_log1alpha)
        << "\n";
}

}  // namespace rgl
