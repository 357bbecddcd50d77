#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace rgl {

// Bernoulli limit thresholds along a p grid.
struct Figure1Row {
  double p = 0.0;
  double x_opt = 0.0;
  double x_beq = 0.0;
  double x_weq = 0.0;
  double x_typ = 0.0;
};

// Requires every p strictly inside (0,1).
std::vector<Figure1Row> figure1_data(std::span<const double> p_grid);

// Entropy curves H_p and H_ptilde along an x grid, with the two crossing
// levels log 2 and log(1 + alpha).
struct Figure2Data {
  double p = 0.0;
  double level_log2 = 0.0;
  double level_log1alpha = 0.0;
  struct Row {
    double x = 0.0;
    double h_p = 0.0;
    double h_ptilde = 0.0;
  };
  std::vector<Row> rows;
};

// Requires p in (0,1) and every x in [0,1].
Figure2Data figure2_data(double p, std::span<const double> x_grid);

void write_figure1_csv(std::span<const Figure1Row> rows, std::ostream& out);
void write_figure2_csv(const Figure2Data& data, std::ostream& out);

}  // namespace rgl
