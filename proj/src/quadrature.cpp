#include "rgl/quadrature.hpp"

#include <cmath>
#include <string>

namespace rgl {
namespace {

struct State {
  const std::function<double(double)>& f;
  int max_splits;
  int splits = 0;
  double error = 0.0;
  bool exhausted = false;
};

double simpson(double fa, double fm, double fb, double width) {
  return width * (fa + 4.0 * fm + fb) / 6.0;
}

double refine(State& st, double a, double b, double fa, double fm, double fb, double whole,
              double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  const bool budget_left = st.splits < st.max_splits && depth < 60;
  if (std::abs(delta) <= 15.0 * tol || !budget_left) {
    if (std::abs(delta) > 15.0 * tol) st.exhausted = true;
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  st.splits += 1;
  return refine(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         refine(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_splits) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("integrate: bad interval");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: tolerance must be positive");

  // Pre-split into uniform panels so a bump well inside a wide interval is
  // seen even when the three initial Simpson samples all land on zeros.
  constexpr int kPanels = 16;
  State st{f, max_splits};
  double value = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double pa = a + (b - a) * i / kPanels;
    const double pb = a + (b - a) * (i + 1) / kPanels;
    const double fa = f(pa);
    const double m = 0.5 * (pa + pb);
    const double fm = f(m);
    const double fb = f(pb);
    const double whole = simpson(fa, fm, fb, pb - pa);
    value += refine(st, pa, pb, fa, fm, fb, whole, abs_tol / kPanels, 0);
  }
  if (st.exhausted && st.error > abs_tol) {
    throw QuadratureError("quadrature did not converge: achieved error bound " +
                              std::to_string(st.error) + " > tolerance " + std::to_string(abs_tol),
                          st.error);
  }
  return {value, st.error, st.splits};
}

}  // namespace rgl
