#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the library's fast paths beyond the data types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "coinflip/boolfn.hpp"
#include "coinflip/protocol.hpp"

namespace oracle {

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Pr[Bin(n, 1/2) >= k]
inline double binomial_tail(int n, int k) {
  std::uint64_t hits = 0;
  for (int j = std::max(k, 0); j <= n; ++j) hits += binomial(n, j);
  return static_cast<double>(hits) / static_cast<double>(std::uint64_t{1} << n);
}

inline coinflip::Dyadic brute_prob(const coinflip::BooleanFunction& f, int o) {
  std::int64_t hits = 0;
  for (std::uint64_t z = 0; z < f.size(); ++z) hits += f(z) == (o == 1);
  return coinflip::Dyadic::of(hits, f.arity());
}

inline coinflip::Dyadic brute_influence(const coinflip::BooleanFunction& f, int i) {
  std::int64_t pivotal = 0;
  for (std::uint64_t z = 0; z < f.size(); ++z) pivotal += f(z) != f(z ^ (std::uint64_t{1} << (i - 1)));
  return coinflip::Dyadic::of(pivotal, f.arity());
}

// g(y) = o iff some assignment of the S coordinates gives f = o.
inline coinflip::BooleanFunction existential_restrict(const coinflip::BooleanFunction& f, const coinflip::CoordSet& s,
                                                      int o) {
  std::vector<int> kept;
  for (int i = 1; i <= f.arity(); ++i)
    if (!s.contains(i)) kept.push_back(i);
  coinflip::BooleanFunction g(static_cast<int>(kept.size()));
  for (std::uint64_t y = 0; y < g.size(); ++y) {
    bool found = false;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << s.size()) && !found; ++x) {
      std::uint64_t z = 0;
      for (std::size_t k = 0; k < kept.size(); ++k)
        if ((y >> k) & 1U) z |= std::uint64_t{1} << (kept[k] - 1);
      std::size_t k = 0;
      for (int i : s)
        if ((x >> k++) & 1U) z |= std::uint64_t{1} << (i - 1);
      found = f(z) == (o == 1);
    }
    g.set(y, found ? o == 1 : o != 1);
  }
  return g;
}

// Optimal-adversary value by direct recursion over player messages: the good
// players' messages of a round are enumerated jointly and averaged, then the
// bad players' messages are enumerated jointly and maximized. Values are
// dyadic with few bits, so doubles are exact here.
class GameOracle {
 public:
  GameOracle(const coinflip::ProtocolSpec& p, const coinflip::CoordSet& bad, std::function<bool(coinflip::Outcome)> win)
      : p_(p), win_(std::move(win)), t_(p.blank_transcript()) {
    for (std::size_t q = 1; q <= p.players; ++q) (bad.contains(static_cast<int>(q)) ? bad_ : good_).push_back(q);
  }

  double value() { return round_value(1); }

 private:
  double round_value(int round) {
    if (round > p_.rounds()) return win_(p_.evaluate(t_)) ? 1.0 : 0.0;
    const int r = p_.bits[round - 1];
    const std::uint64_t good_count = std::uint64_t{1} << (r * good_.size());
    const std::uint64_t bad_count = std::uint64_t{1} << (r * bad_.size());
    double total = 0;
    for (std::uint64_t g = 0; g < good_count; ++g) {
      assign(good_, round, r, g);
      double best = 0;
      for (std::uint64_t b = 0; b < bad_count; ++b) {
        assign(bad_, round, r, b);
        best = std::max(best, round_value(round + 1));
      }
      total += best;
    }
    return total / static_cast<double>(good_count);
  }

  void assign(const std::vector<std::size_t>& who, int round, int r, std::uint64_t pattern) {
    const std::uint64_t mask = (std::uint64_t{1} << r) - 1;
    for (std::size_t k = 0; k < who.size(); ++k) t_.set_message(round, who[k], (pattern >> (k * r)) & mask);
  }

  const coinflip::ProtocolSpec& p_;
  std::function<bool(coinflip::Outcome)> win_;
  coinflip::Transcript t_;
  std::vector<std::size_t> good_, bad_;
};

inline double game_value(const coinflip::ProtocolSpec& p, const coinflip::CoordSet& bad, coinflip::Outcome o) {
  return GameOracle(p, bad, [o](coinflip::Outcome x) { return x == o; }).value();
}

}  // namespace oracle
