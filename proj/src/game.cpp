#include "rgl/game.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "rgl/format.hpp"
#include "rgl/rng.hpp"

namespace rgl {
namespace {

constexpr std::uint64_t kProfileListCap = 1000000;
constexpr int kFloatBins = 32;

// Masks for exchanging bit pairs at distance d = 2^i within a word.
constexpr std::uint64_t kSwapMask[6] = {
    0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
    0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL,
};

std::uint64_t delta_swap(std::uint64_t w, int i) {
  const std::uint64_t m = kSwapMask[i];
  const int d = 1 << i;
  return ((w >> d) & m) | ((w & m) << d);
}

void check_capacity(int n, bool packed, const MemoryPolicy& mem) {
  if (n < 1 || n > 30) throw std::invalid_argument("game: n must lie in [1, 30]");
  const std::uint64_t entries = static_cast<std::uint64_t>(n) << n;
  const std::uint64_t bytes = packed ? entries / 8 + 8 : entries * 8;
  if (mem.cap_bytes) {
    if (bytes > *mem.cap_bytes)
      throw CapacityError("game: payoff table needs " + std::to_string(bytes) +
                          " bytes, over the configured cap of " + std::to_string(*mem.cap_bytes) +
                          "; raise --mem-cap / RGL_MEM_CAP_BYTES");
  } else if (n > (packed ? 28 : 24)) {
    throw CapacityError(std::string("game: n exceeds the default cap (") +
                        (packed ? "28 bit-packed" : "24 double") +
                        "); set --mem-cap / RGL_MEM_CAP_BYTES to override");
  }
}

void kahan_add(double& sum, double& comp, double term) {
  const double y = term - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace

int min_count_at_least(int n, double x) {
  for (int k = 0; k <= n; ++k)
    if (static_cast<double>(k) / n >= x) return k;
  return n + 1;
}

int max_count_at_most(int n, double x) {
  for (int k = n; k >= 0; --k)
    if (static_cast<double>(k) / n <= x) return k;
  return -1;
}

void ensure_capacity(int n, const PayoffDistribution& d, const MemoryPolicy& mem) {
  check_capacity(n, d.is_bernoulli(), mem);
}

Game Game::generate(int n, const PayoffDistribution& d, std::uint64_t seed,
                    const MemoryPolicy& mem) {
  const bool packed = d.is_bernoulli();
  check_capacity(n, packed, mem);

  Game g;
  g.n_ = n;
  g.seed_ = seed;
  g.packed_ = packed;
  const std::uint64_t profiles = std::uint64_t{1} << n;
  std::mt19937_64 rng(seed);

  if (packed) {
    const double p = std::get<Bernoulli>(d.spec()).p;
    g.words_per_plane_ = (profiles + 63) / 64;
    g.planes_.assign(static_cast<std::size_t>(n) * g.words_per_plane_, 0);
    for (int i = 0; i < n; ++i) {
      std::uint64_t* plane = g.planes_.data() + static_cast<std::size_t>(i) * g.words_per_plane_;
      for (std::uint64_t s = 0; s < profiles; ++s) {
        if (uniform01(rng) < p) plane[s >> 6] |= std::uint64_t{1} << (s & 63);
      }
    }
  } else {
    g.table_.resize(static_cast<std::size_t>(n) * profiles);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (std::uint64_t s = 0; s < profiles; ++s) g.table_[idx++] = d.sample(rng);
  }
  return g;
}

Game Game::from_table(int n, std::vector<double> payoffs) {
  if (n < 1 || n > 30) throw std::invalid_argument("game: n must lie in [1, 30]");
  const std::size_t expected = static_cast<std::size_t>(n) << n;
  if (payoffs.size() != expected)
    throw std::invalid_argument("game: table must hold n * 2^n payoffs");
  for (double v : payoffs)
    if (!std::isfinite(v)) throw std::invalid_argument("game: payoffs must be finite");
  Game g;
  g.n_ = n;
  g.packed_ = false;
  g.table_ = std::move(payoffs);
  return g;
}

double Game::payoff(int player, Profile s) const {
  if (packed_) {
    const std::uint64_t w = planes_[static_cast<std::size_t>(player) * words_per_plane_ + (s >> 6)];
    return static_cast<double>((w >> (s & 63)) & 1);
  }
  return table_[(static_cast<std::size_t>(player) << n_) | s];
}

bool Game::is_pne(Profile s) const {
  for (int i = 0; i < n_; ++i) {
    const Profile flip = s ^ (Profile{1} << i);
    if (payoff(i, s) < payoff(i, flip)) return false;
  }
  return true;
}

std::vector<std::uint64_t> Game::ne_mask() const {
  const std::uint64_t profiles = profile_count();
  const std::uint64_t words = (profiles + 63) / 64;
  std::vector<std::uint64_t> ne(words, ~std::uint64_t{0});

  if (packed_) {
    for (int i = 0; i < n_; ++i) {
      const std::uint64_t* plane = planes_.data() + static_cast<std::size_t>(i) * words_per_plane_;
      if (i < 6) {
        for (std::uint64_t w = 0; w < words; ++w) {
          // s and s^2^i live in the same word; a player blocks equilibrium
          // at s only when u_i(s) = 0 and u_i(s^2^i) = 1.
          ne[w] &= plane[w] | ~delta_swap(plane[w], i);
        }
      } else {
        const std::uint64_t stride = std::uint64_t{1} << (i - 6);
        for (std::uint64_t w = 0; w < words; ++w) ne[w] &= plane[w] | ~plane[w ^ stride];
      }
    }
  } else {
    for (int i = 0; i < n_; ++i) {
      const double* plane = table_.data() + (static_cast<std::size_t>(i) << n_);
      const Profile bit = Profile{1} << i;
      for (std::uint64_t s = 0; s < profiles; ++s) {
        if (plane[s] < plane[s ^ bit]) ne[s >> 6] &= ~(std::uint64_t{1} << (s & 63));
      }
    }
  }
  if (profiles < 64) ne[0] &= (std::uint64_t{1} << profiles) - 1;
  return ne;
}

std::vector<Profile> Game::enumerate_pne() const {
  const auto ne = ne_mask();
  std::vector<Profile> out;
  for (std::uint64_t w = 0; w < ne.size(); ++w) {
    std::uint64_t bits = ne[w];
    while (bits) {
      out.push_back(static_cast<Profile>((w << 6) + std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

EquilibriumReport Game::report(std::span<const double> thresholds,
                               std::span<const double> epsilons, double x_typ) const {
  EquilibriumReport rep;
  rep.x_typ = x_typ;
  rep.epsilons.assign(epsilons.begin(), epsilons.end());
  rep.typ_counts.assign(epsilons.size(), 0);
  rep.thresholds.resize(thresholds.size());
  for (std::size_t j = 0; j < thresholds.size(); ++j) rep.thresholds[j].x = thresholds[j];

  const std::uint64_t profiles = profile_count();
  const auto ne = ne_mask();

  if (packed_) {
    // Bit-sliced vertical counters: slice b holds bit b of the per-profile
    // ones count, so ASU stays an exact integer popcount over players.
    const std::uint64_t words = ne.size();
    std::vector<std::uint64_t> slices(5 * words, 0);
    for (int i = 0; i < n_; ++i) {
      const std::uint64_t* plane = planes_.data() + static_cast<std::size_t>(i) * words_per_plane_;
      for (std::uint64_t w = 0; w < words; ++w) {
        std::uint64_t carry = plane[w];
        for (int b = 0; b < 5 && carry; ++b) {
          std::uint64_t* slice = slices.data() + static_cast<std::size_t>(b) * words;
          const std::uint64_t t = slice[w] & carry;
          slice[w] ^= carry;
          carry = t;
        }
      }
    }
    std::vector<std::uint64_t> hist_all(n_ + 1, 0), hist_ne(n_ + 1, 0);
    const std::uint64_t tail_mask =
        profiles < 64 ? (std::uint64_t{1} << profiles) - 1 : ~std::uint64_t{0};
    for (std::uint64_t w = 0; w < words; ++w) {
      const std::uint64_t valid = (w + 1 == words) ? tail_mask : ~std::uint64_t{0};
      for (int k = 0; k <= n_; ++k) {
        std::uint64_t mask = valid;
        for (int b = 0; b < 5; ++b) {
          const std::uint64_t slice = slices[static_cast<std::size_t>(b) * words + w];
          mask &= (k >> b) & 1 ? slice : ~slice;
        }
        if (!mask) continue;
        hist_all[k] += std::popcount(mask);
        hist_ne[k] += std::popcount(mask & ne[w]);
      }
    }

    int so_k = 0, beq_k = -1, weq_k = -1;
    std::uint64_t ne_total = 0;
    double asu_sum_scaled = 0.0;  // sum of k * count, exact in double
    for (int k = 0; k <= n_; ++k) {
      if (hist_all[k]) so_k = k;
      if (hist_ne[k]) {
        ne_total += hist_ne[k];
        beq_k = k;
        if (weq_k < 0) weq_k = k;
        asu_sum_scaled += static_cast<double>(k) * static_cast<double>(hist_ne[k]);
      }
    }
    rep.ne_count = ne_total;
    rep.so = static_cast<double>(so_k) / n_;
    if (ne_total > 0) {
      rep.beq = static_cast<double>(beq_k) / n_;
      rep.weq = static_cast<double>(weq_k) / n_;
      rep.asu_ne.min = *rep.weq;
      rep.asu_ne.max = *rep.beq;
      rep.asu_ne.mean = asu_sum_scaled / (static_cast<double>(n_) * static_cast<double>(ne_total));
      rep.asu_ne.bin_lo = -0.5 / n_;
      rep.asu_ne.bin_hi = 1.0 + 0.5 / n_;
      rep.asu_ne.bins = hist_ne;
    }
    for (int k = 0; k <= n_; ++k) {
      const double asu = static_cast<double>(k) / n_;
      for (std::size_t j = 0; j < epsilons.size(); ++j)
        if (std::abs(asu - x_typ) < epsilons[j]) rep.typ_counts[j] += hist_ne[k];
      for (auto& tc : rep.thresholds) {
        if (asu >= tc.x) {
          tc.w_plus += hist_all[k];
          tc.z_plus += hist_ne[k];
        }
        if (asu <= tc.x) {
          tc.w_minus += hist_all[k];
          tc.z_minus += hist_ne[k];
        }
      }
    }
    for (std::uint64_t w = 0; w < ne.size() && !rep.ne_profiles_truncated; ++w) {
      std::uint64_t bits = ne[w];
      while (bits) {
        if (rep.ne_profiles.size() >= kProfileListCap) {
          rep.ne_profiles_truncated = true;
          break;
        }
        rep.ne_profiles.push_back(static_cast<Profile>((w << 6) + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return rep;
  }

  // Generic path: per-player sequential passes with compensated summation,
  // then one counter pass over profiles.
  std::vector<double> asu(profiles, 0.0), comp(profiles, 0.0);
  for (int i = 0; i < n_; ++i) {
    const double* plane = table_.data() + (static_cast<std::size_t>(i) << n_);
    for (std::uint64_t s = 0; s < profiles; ++s) kahan_add(asu[s], comp[s], plane[s]);
  }

  double so = -std::numeric_limits<double>::infinity();
  double beq = -std::numeric_limits<double>::infinity();
  double weq = std::numeric_limits<double>::infinity();
  std::vector<double> ne_asus;
  double ne_asu_sum = 0.0, ne_asu_comp = 0.0;
  for (std::uint64_t s = 0; s < profiles; ++s) {
    const double a = asu[s] / n_;
    so = std::max(so, a);
    for (auto& tc : rep.thresholds) {
      if (a >= tc.x) tc.w_plus += 1;
      if (a <= tc.x) tc.w_minus += 1;
    }
    if (!((ne[s >> 6] >> (s & 63)) & 1)) continue;
    rep.ne_count += 1;
    beq = std::max(beq, a);
    weq = std::min(weq, a);
    kahan_add(ne_asu_sum, ne_asu_comp, a);
    if (rep.ne_profiles.size() < kProfileListCap) {
      rep.ne_profiles.push_back(static_cast<Profile>(s));
      ne_asus.push_back(a);
    } else {
      rep.ne_profiles_truncated = true;
    }
    for (std::size_t j = 0; j < epsilons.size(); ++j)
      if (std::abs(a - x_typ) < epsilons[j]) rep.typ_counts[j] += 1;
    for (auto& tc : rep.thresholds) {
      if (a >= tc.x) tc.z_plus += 1;
      if (a <= tc.x) tc.z_minus += 1;
    }
  }
  rep.so = so;
  if (rep.ne_count > 0) {
    rep.beq = beq;
    rep.weq = weq;
    rep.asu_ne.min = weq;
    rep.asu_ne.max = beq;
    rep.asu_ne.mean = ne_asu_sum / static_cast<double>(rep.ne_count);
    if (!rep.ne_profiles_truncated) {
      rep.asu_ne.bin_lo = weq;
      rep.asu_ne.bin_hi = beq;
      rep.asu_ne.bins.assign(kFloatBins, 0);
      const double width = beq > weq ? beq - weq : 1.0;
      for (double a : ne_asus) {
        int bin = static_cast<int>((a - weq) / width * kFloatBins);
        bin = std::clamp(bin, 0, kFloatBins - 1);
        rep.asu_ne.bins[bin] += 1;
      }
    }
  }
  return rep;
}

void Game::dump_csv(std::ostream& out) const {
  if (n_ > 12) throw std::invalid_argument("dump_csv: limited to n <= 12");
  out << "profile,player,payoff\n";
  for (Profile s = 0; s < profile_count(); ++s)
    for (int i = 0; i < n_; ++i)
      out << s << ',' << i << ',' << format_double(payoff(i, s)) << '\n';
}

}  // namespace rgl
