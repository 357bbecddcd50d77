#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rgl/distribution.hpp"

namespace rgl {

using Profile = std::uint32_t;  // player i's strategy is bit i

class CapacityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Payoff-table memory policy. Without an explicit byte cap the defaults are
// n <= 24 for double payoffs and n <= 28 for bit-packed Bernoulli games;
// with a cap, admission is by table bytes (n * 2^n * 8 resp. n * 2^n / 8).
struct MemoryPolicy {
  std::optional<std::uint64_t> cap_bytes;
};

struct AsuSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // Uniform bins on [bin_lo, bin_hi]; for packed games bin k is centered on
  // ASU = k/n and the counts are exact.
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  std::vector<std::uint64_t> bins;
};

struct ThresholdCounts {
  double x = 0.0;
  std::uint64_t w_plus = 0;   // profiles with ASU >= x
  std::uint64_t w_minus = 0;  // profiles with ASU <= x
  std::uint64_t z_plus = 0;   // equilibria with ASU >= x
  std::uint64_t z_minus = 0;  // equilibria with ASU <= x
};

struct EquilibriumReport {
  std::uint64_t ne_count = 0;
  std::vector<Profile> ne_profiles;  // ascending, capped
  bool ne_profiles_truncated = false;
  double so = 0.0;                   // max ASU over all profiles
  std::optional<double> beq;         // absent when ne_count == 0
  std::optional<double> weq;
  AsuSummary asu_ne;
  double x_typ = 0.0;                        // echoed from the caller
  std::vector<double> epsilons;              // echoed
  std::vector<std::uint64_t> typ_counts;     // |ASU - x_typ| < eps, strict
  std::vector<ThresholdCounts> thresholds;   // weak inequalities
};

// A realized n-player binary-action game. Immutable once generated; payoffs
// are drawn player-major, profile-minor from the given seed, so (n, dist,
// seed) regenerates the table bit-exactly. Bernoulli payoffs are bit-packed
// one bit per entry.
class Game {
 public:
  static Game generate(int n, const PayoffDistribution& d, std::uint64_t seed,
                       const MemoryPolicy& mem = {});
  // Explicit payoff table, player-major: payoffs[(i << n) | s]. Always uses
  // the generic double-payoff representation.
  static Game from_table(int n, std::vector<double> payoffs);

  int player_count() const { return n_; }
  std::uint64_t profile_count() const { return std::uint64_t{1} << n_; }
  std::uint64_t seed() const { return seed_; }
  bool packed() const { return packed_; }

  double payoff(int player, Profile s) const;

  // Weak-inequality best response check: no player strictly gains by
  // flipping their bit. Ties favor equilibrium.
  bool is_pne(Profile s) const;

  // All pure Nash equilibria, ascending by profile index. Packed games use
  // word-parallel neighbor comparisons.
  std::vector<Profile> enumerate_pne() const;

  EquilibriumReport report(std::span<const double> thresholds, std::span<const double> epsilons,
                           double x_typ) const;

  // Debug dump, header "profile,player,payoff"; limited to n <= 12.
  void dump_csv(std::ostream& out) const;

 private:
  Game() = default;
  std::vector<std::uint64_t> ne_mask() const;  // bit s set iff profile s is a PNE

  int n_ = 0;
  std::uint64_t seed_ = 0;
  bool packed_ = false;
  std::vector<double> table_;          // generic path, player-major
  std::vector<std::uint64_t> planes_;  // packed path, plane i at [i * words_per_plane, ...)
  std::uint64_t words_per_plane_ = 0;
};

// Smallest k such that k/n >= x under double comparison. Shared by the game
// counters and the exact binomial/convolution tails so threshold semantics
// match bit for bit. Returns n + 1 when even ASU = 1 stays below x.
int min_count_at_least(int n, double x);

// Largest k such that k/n <= x under double comparison, or -1 if none.
int max_count_at_most(int n, double x);

// Capacity check without generating; throws CapacityError like generate().
void ensure_capacity(int n, const PayoffDistribution& d, const MemoryPolicy& mem);

}  // namespace rgl
