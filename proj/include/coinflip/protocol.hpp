#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coinflip/boolfn.hpp"
#include "coinflip/dyadic.hpp"
#include "coinflip/rng.hpp"
#include "coinflip/stats.hpp"

namespace coinflip {

// Exact evaluation paths enumerate every transcript bit; this caps the total.
inline constexpr int kExactBudget = 22;

enum class Domain { coin, leader };

// Coin outcomes are 0/1; leader outcomes are player indices 1..players.
using Outcome = std::uint32_t;

// Every bit broadcast during a run. Round i holds `players * bits(i)` bits;
// player p's message occupies positions (p-1)*r_i .. p*r_i - 1 of its round,
// least significant bit first. Rounds are 1-based, players 1-based.
class Transcript {
 public:
  Transcript() = default;
  Transcript(std::size_t players, std::vector<int> bits_per_round);

  std::size_t players() const { return players_; }
  int rounds() const { return static_cast<int>(bits_.size()); }
  int bits(int round) const { return bits_.at(round - 1); }
  std::size_t round_size(int round) const { return players_ * bits(round); }
  std::size_t total_bits() const;

  bool bit(int round, std::size_t pos) const {
    return (words_[round - 1][pos >> 6] >> (pos & 63)) & 1U;
  }
  void set_bit(int round, std::size_t pos, bool v);

  std::uint64_t message(int round, std::size_t player) const;
  void set_message(int round, std::size_t player, std::uint64_t value);

  // Uniform bits for one round, drawn 64 at a time from rng.
  void fill_random(int round, Rng& rng);
  void clear_round(int round);

  // Rounds 1..rounds_used packed into one integer, round 1 least significant.
  // Requires the packed width to be <= 64 bits.
  std::uint64_t index(int rounds_used) const;
  void set_from_index(int rounds_used, std::uint64_t index);

  // Copy holding only rounds 1..rounds_used.
  Transcript truncated(int rounds_used) const;

 private:
  std::size_t players_ = 0;
  std::vector<int> bits_;
  std::vector<std::vector<std::uint64_t>> words_;
};

// A k-round full-information protocol: the shape of a transcript plus a pure,
// total evaluator from transcripts to outcomes.
struct ProtocolSpec {
  std::string name;
  std::size_t players = 1;
  std::vector<int> bits;  // r_1..r_k
  Domain domain = Domain::coin;
  std::function<Outcome(const Transcript&)> evaluate;

  int rounds() const { return static_cast<int>(bits.size()); }
  std::size_t total_bits() const;
  Transcript blank_transcript() const { return Transcript(players, bits); }
  // Throws InvalidArgument on an empty or malformed shape.
  void validate() const;
};

// Adversarial bit positions per round (0-based positions within the round).
// Player coalitions are the special case that owns every bit of its members
// in every round; the multi-bit attack works with arbitrary bit sets.
struct BitCoalition {
  std::vector<std::vector<std::size_t>> positions;  // one sorted list per round

  static BitCoalition none(const ProtocolSpec& p);
  static BitCoalition of_players(const ProtocolSpec& p, const CoordSet& players);

  // Players owning at least one adversarial bit.
  CoordSet owners(const ProtocolSpec& p) const;
  std::size_t bit_count() const;
  void add(int round, std::size_t pos);
  void merge(const BitCoalition& other);
};

// The bad players' strategy. `respond(round, t)` is called once per round
// after every good player's message for that round is in `t` (bad messages
// of earlier rounds are present too, bad messages of this round are zero)
// and returns one message per coalition member, in coalition order.
struct AdversaryStrategy {
  CoordSet coalition;
  std::function<std::vector<std::uint64_t>(int round, const Transcript&)> respond;
};

using OutcomePredicate = std::function<bool(Outcome)>;

// --- runs -------------------------------------------------------------------

Outcome honest_run(const ProtocolSpec& p, Rng& rng);

// Draws all players' bits exactly as honest_run does, then overwrites the
// coalition's messages with the strategy's responses round by round.
Outcome run_with_adversary(const ProtocolSpec& p, const AdversaryStrategy& adv, Rng& rng);

AdversaryStrategy honest_strategy();
// Every coalition member sends `message` every round.
AdversaryStrategy constant_strategy(const CoordSet& coalition, std::uint64_t message);
// Pseudo-random (transcript-hashed) messages before the last round, then the
// first last-round pattern (lowest index) that makes `target` hold.
AdversaryStrategy last_round_best_response(const ProtocolSpec& p, const CoordSet& coalition,
                                           OutcomePredicate target);

struct MonteCarloEstimate {
  double estimate = 0;
  double ci_halfwidth = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
};

// Trial t uses Rng(Rng::derive(seed, t)); hit counts are order independent so
// the result does not depend on thread scheduling.
MonteCarloEstimate monte_carlo_value(const ProtocolSpec& p, const AdversaryStrategy& adv,
                                     const OutcomePredicate& target, std::uint64_t trials,
                                     std::uint64_t seed,
                                     double confidence = stats::kDefaultConfidence);
MonteCarloEstimate monte_carlo_value(const ProtocolSpec& p, const AdversaryStrategy& adv,
                                     Outcome o, std::uint64_t trials, std::uint64_t seed,
                                     double confidence = stats::kDefaultConfidence);

// --- exact evaluation -------------------------------------------------------

// max over adversary strategies of Pr[target(outcome)], by backward induction:
// each round averages over good bit patterns, then maximizes over bad bit
// patterns. Throws CapacityError when total_bits exceeds `budget`.
Dyadic exact_value(const ProtocolSpec& p, const BitCoalition& bad, const OutcomePredicate& target,
                   int budget = kExactBudget);

Dyadic exact_adversary_value(const ProtocolSpec& p, const CoordSet& coalition, Outcome o,
                             int budget = kExactBudget);

// Leader protocols: the coalition's best probability of electing one of its own.
Dyadic exact_bad_leader_value(const ProtocolSpec& p, const CoordSet& coalition,
                              int budget = kExactBudget);

// Transcripts reached under the optimal strategy (ties broken toward the
// lowest bad pattern): reached[t.index(k)] = 1. Each reached transcript has
// probability 2^-(good bits).
struct OptimalPlay {
  Dyadic value;
  int good_bits = 0;
  std::vector<std::uint8_t> reached;
};
OptimalPlay optimal_play(const ProtocolSpec& p, const BitCoalition& bad, const OutcomePredicate& target,
                         int budget = kExactBudget);

// The deterministic optimal responder realizing exact_value.
AdversaryStrategy optimal_strategy(const ProtocolSpec& p, const CoordSet& coalition,
                                   OutcomePredicate target, int budget = kExactBudget);

// Truth table of a 1-round coin protocol over players * r_1 bits.
BooleanFunction protocol_table(const ProtocolSpec& p);

// pi_alpha: round-k table for a fixed prefix (rounds 1..k-1 of `prefix` are
// used). Input bit layout is the round-k layout: player 1's bits lowest.
BooleanFunction induced_round_function(const ProtocolSpec& p, const Transcript& prefix);

// Runs p, then reads the first bit of the elected player's message in an
// extra round with r_{k+1} = r_k.
ProtocolSpec leader_to_coinflip(const ProtocolSpec& p);

enum class EvalMode { exact, monte_carlo };

struct ResilienceOptions {
  EvalMode mode = EvalMode::exact;
  int budget = kExactBudget;
  std::uint64_t max_coalitions = 100000;
  std::uint64_t trials = 20000;  // monte_carlo only
  std::uint64_t seed = 0;
};

struct ResilienceReport {
  bool resilient = false;
  CoordSet worst_coalition;
  // Coin: the outcome being forced. Leader: unused (the event is "leader in B").
  Outcome worst_outcome = 0;
  double value = 0;
  std::optional<Dyadic> exact_value;
  double ci_halfwidth = 0;
  std::uint64_t coalitions_checked = 0;
  EvalMode mode = EvalMode::exact;
};

// (b, gamma)-resilience: every coalition of size b keeps each coin outcome
// (or, for leader election, a bad leader) at probability <= 1 - gamma.
// Coalitions of size exactly b suffice because the value is monotone in B.
// Monte Carlo mode plays last_round_best_response, which lower-bounds the
// optimal adversary.
ResilienceReport resilience_check(const ProtocolSpec& p, int b, double gamma,
                                  const ResilienceOptions& options = {});

}  // namespace coinflip
