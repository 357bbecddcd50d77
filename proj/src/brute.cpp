#include "rgl/brute.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>

#include "rgl/game.hpp"

namespace rgl {

BruteForceResult brute_force_expectations(int n, double p, std::span<const double> xs) {
  if (n < 1 || n * (1 << n) > 24)
    throw std::invalid_argument("brute force: n * 2^n must be <= 24");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("brute force: p must lie in [0,1]");

  const int profiles = 1 << n;
  const int bits = n * profiles;
  const std::uint32_t tables = std::uint32_t{1} << bits;

  BruteForceResult out;
  out.n = n;
  out.p = p;
  out.alpha = p * p + (1.0 - p) * (1.0 - p);
  out.p_tilde = p / (1.0 - p + p * p);

  // Per-profile payoff column and best-response bit positions.
  std::vector<std::uint32_t> colmask(profiles, 0);
  std::vector<int> self_bit(profiles * n), flip_bit(profiles * n);
  for (int s = 0; s < profiles; ++s) {
    for (int i = 0; i < n; ++i) {
      colmask[s] |= std::uint32_t{1} << (i * profiles + s);
      self_bit[s * n + i] = i * profiles + s;
      flip_bit[s * n + i] = i * profiles + (s ^ (1 << i));
    }
  }
  std::vector<int> kmin(xs.size()), kmax(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    kmin[j] = min_count_at_least(n, xs[j]);
    kmax[j] = max_count_at_most(n, xs[j]);
  }
  std::vector<double> pw(bits + 1), qw(bits + 1);
  pw[0] = qw[0] = 1.0;
  for (int k = 1; k <= bits; ++k) {
    pw[k] = pw[k - 1] * p;
    qw[k] = qw[k - 1] * (1.0 - p);
  }

  double e_ne = 0.0;
  std::vector<double> ep(xs.size(), 0.0), ep2(xs.size(), 0.0);
  std::vector<double> em(xs.size(), 0.0), em2(xs.size(), 0.0);
  std::vector<int> zp(xs.size()), zm(xs.size());

  for (std::uint32_t table = 0; table < tables; ++table) {
    int ne = 0;
    for (auto& v : zp) v = 0;
    for (auto& v : zm) v = 0;
    for (int s = 0; s < profiles; ++s) {
      bool pne = true;
      for (int i = 0; i < n; ++i) {
        if (!((table >> self_bit[s * n + i]) & 1) && ((table >> flip_bit[s * n + i]) & 1)) {
          pne = false;
          break;
        }
      }
      if (!pne) continue;
      ++ne;
      const int k = std::popcount(table & colmask[s]);
      for (std::size_t j = 0; j < xs.size(); ++j) {
        if (k >= kmin[j]) ++zp[j];
        if (k <= kmax[j]) ++zm[j];
      }
    }
    const int ones = std::popcount(table);
    const double w = pw[ones] * qw[bits - ones];
    e_ne += w * ne;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      ep[j] += w * zp[j];
      ep2[j] += w * zp[j] * zp[j];
      em[j] += w * zm[j];
      em2[j] += w * zm[j] * zm[j];
    }
  }

  out.e_ne = e_ne;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    BruteForceResult::ZMoments zm_out;
    zm_out.x = xs[j];
    zm_out.e_plus = ep[j];
    zm_out.e_plus_sq = ep2[j];
    zm_out.var_plus = ep2[j] - ep[j] * ep[j];
    zm_out.ratio_plus = ep[j] > 0.0 ? ep2[j] / (ep[j] * ep[j]) : 0.0;
    zm_out.e_minus = em[j];
    zm_out.e_minus_sq = em2[j];
    out.z.push_back(zm_out);
  }
  return out;
}

}  // namespace rgl
