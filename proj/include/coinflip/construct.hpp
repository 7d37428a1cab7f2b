#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coinflip/boolfn.hpp"
#include "coinflip/protocol.hpp"
#include "coinflip/rng.hpp"

namespace coinflip {

// A (b, n, s)-assembly: n disjoint player sets of size s inside [1, universe],
// at most b of which contain a bad player. Sets flagged by lightest_bin
// padding count as bad regardless of their members.
struct Assembly {
  std::size_t universe = 0;
  std::vector<std::vector<int>> sets;  // members ascending
  std::vector<std::uint8_t> bad;       // per player, index 0 unused
  std::vector<std::uint8_t> flagged;   // per set
  double declared_b = 0;

  std::size_t n() const { return sets.size(); }
  std::size_t s() const { return sets.empty() ? 0 : sets.front().size(); }
  bool set_is_bad(std::size_t j) const;
  std::size_t bad_set_count() const;
  // Disjointness, equal sizes, range, and bad_set_count <= declared_b.
  // Throws InvalidArgument.
  void validate() const;
};

// Singletons {1}, ..., {universe}; declared b = |bad|.
Assembly singleton_assembly(std::size_t universe, const CoordSet& bad = {});

// Consecutive parts of t sets are merged; the n mod t trailing sets are dropped.
Assembly grouping(const Assembly& a, int t);

// Each set is cut into t consecutive fragments. Throws ScheduleError unless t | s.
Assembly splitting(const Assembly& a, int t);

enum class VoteEncoding { mod, reject };

// Vote of a set whose members sent `bits` (member order, first member least
// significant): the integer value mod beta.
int vote_of(const std::vector<std::uint8_t>& bits, int beta);

struct VoteContext {
  const Assembly& assembly;
  int beta;
  const std::vector<int>& votes;  // -1 for bad sets
  const std::vector<std::size_t>& good_histogram;
};

// Returns one vote in [0, beta) per bad set, in set order.
using BadVoter = std::function<std::vector<int>(const VoteContext&)>;

// Every bad set votes for the bin lightest among good votes (ties: lowest bin).
BadVoter pile_on_lightest();

struct LightestBinOptions {
  VoteEncoding encoding = VoteEncoding::mod;
  BadVoter adversary;  // empty: pile_on_lightest
};

struct LightestBinResult {
  Assembly out;
  std::vector<int> votes;
  std::vector<std::size_t> histogram;       // all votes
  std::vector<std::size_t> good_histogram;  // votes of good sets
  int chosen = 0;
  std::size_t voted_sets = 0;  // sets that voted for the chosen bin
  std::size_t padded = 0;
  std::uint64_t rerolls = 0;   // reject encoding only
  bool uniform_encoding = true;  // false when beta does not divide 2^s under mod
};

// One lightest-bin round with good votes drawn from rng (s bits per set, one
// rng.bit() per member in member order). Output: the chosen bin's sets in
// index order, padded to ceil(n / beta) with the lowest unused sets, which
// are flagged bad. Throws ScheduleError when beta > 2^s.
LightestBinResult lightest_bin(const Assembly& a, int beta, Rng& rng, const LightestBinOptions& options = {});

// Same selection from fixed votes (every set's vote given, good or bad).
LightestBinResult lightest_bin_from_votes(const Assembly& a, int beta, const std::vector<int>& votes);

// beta * exp(-delta^2 (n - b) / (2 beta))
double lightest_bin_failure_bound(std::size_t n, std::size_t b, int beta, double delta);

enum class TransformKind { grouping, splitting, lightest_bin };

struct TransformParams {
  int t = 1;
  int beta = 1;
  double delta = 0;
};

// Checks shape and the measured bad-set count of `out` against the bound for
// the transformation applied to `in`: b, b*t, or b/beta + delta(n-b)/beta
// plus the padding slack ceil(n/beta) - n/beta. The lightest-bin bound only
// holds with the probability given by lightest_bin_failure_bound.
bool verify_transformation_arithmetic(const Assembly& in, const Assembly& out, TransformKind op,
                                      const TransformParams& params);

// --- resilient functions ----------------------------------------------------

enum class ResilientKind { recmaj3, tribes, majority, parity };

struct ResilientChoice {
  ResilientKind kind = ResilientKind::recmaj3;
  int width = 2;  // tribes only

  // "recmaj3", "majority", "parity", "tribes:<width>"
  static ResilientChoice parse(const std::string& text);
  std::string str() const;
};

// The choice instantiated on the largest arity it supports that is <= n:
// recmaj3 3^d, majority the largest odd number, tribes floor(n/width) tribes,
// parity n. Inputs are the first `arity` sets.
struct ResilientFunction {
  ResilientChoice choice;
  int arity = 0;
  int depth = 0;   // recmaj3
  int tribes = 0;  // tribes

  bool operator()(const std::vector<std::uint8_t>& bits) const;
  // Truth table when arity <= kMaxArity.
  std::optional<BooleanFunction> table() const;
  // Pr[f = 1] in closed form.
  double prob_one() const;
  // |Pr[f = 1] - 1/2|, exact through the table when available.
  double imbalance() const;
  std::optional<Dyadic> exact_prob_one() const;
};

// Throws InvalidArgument when n admits no instance (n = 0, tribes wider than n).
ResilientFunction make_resilient(const ResilientChoice& choice, std::size_t n);

// One-round coin protocol on a.universe players (1 bit each): the lowest
// member of each of the first `arity` sets contributes its bit.
ProtocolSpec resilient_round(const Assembly& a, const ResilientChoice& choice);

// max over o of Pr[f|_B = o] - 1/2 where B holds the function inputs fed by
// bad sets. Exact; requires arity <= kMaxArity.
double resilient_adversarial_distance(const Assembly& a, const ResilientChoice& choice);

// --- pipeline ---------------------------------------------------------------

struct StageConfig {
  TransformKind op = TransformKind::grouping;  // grouping or splitting
  int t = 1;
  int beta = 1;
  double delta = 0;
};

// stages[i] runs in round i+1; the resilient function uses round k = stages+1.
struct PipelineConfig {
  std::vector<StageConfig> stages;
  ResilientChoice resilient;
  double gamma = 0;
  int rounds() const { return static_cast<int>(stages.size()) + 1; }
};

struct Schedule {
  PipelineConfig config;
  std::vector<std::string> warnings;
};

// The asymptotic schedule rounded to integers. Round 1 groups with
// t = 3 log l and beta = l / (log l)^3; round i in 2..k-1 splits with
// t = log^(i-1) l / log^(i) l and beta = t^3; delta_i = (log^(i) l)^-0.25.
// t and beta round down (t to a divisor of s when splitting, and to at most
// n), beta = 1 becomes an identity stage; every rounding adds a warning.
Schedule paper_schedule(std::size_t players, int k, double gamma = 0,
                        const ResilientChoice& resilient = {});

// Parses "group:36:2,split:3:37" (op:t:beta, optional :delta).
std::vector<StageConfig> parse_stages(const std::string& text);

struct StageShape {
  std::size_t n_before = 0, s_before = 0;  // before the transformation
  std::size_t n = 0, s = 0;                // after it, before the vote
  std::size_t n_after = 0;                 // after the lightest-bin selection
};

struct Pipeline {
  std::size_t players = 0;
  PipelineConfig config;
  std::vector<StageShape> shapes;
  ResilientFunction fn;
  // Singletons after the round-1 transformation; it does not depend on the transcript.
  Assembly first;
};

// Checks the schedule (t >= 1, t | s when splitting, non-empty stages,
// beta <= 2^s, the resilient function fits) and fixes the shapes. Throws
// ScheduleError naming the failing stage.
Pipeline plan_pipeline(const PipelineConfig& cfg, std::size_t players);

// k-round coin protocol, 1 bit per player per round, evaluating the plan.
ProtocolSpec build_pipeline(const PipelineConfig& cfg, std::size_t players);
ProtocolSpec pipeline_protocol(const Pipeline& plan);

struct PipelineTrace {
  std::vector<Assembly> assemblies;  // start, then after each transform and each selection
  std::vector<LightestBinResult> selections;
  std::vector<std::uint8_t> final_bits;  // resilient function inputs
  Outcome output = 0;
};

// The evaluator's step-by-step state on a transcript (all players good).
PipelineTrace trace_pipeline(const Pipeline& plan, const Transcript& t);

// The pipeline run directly on labelled assemblies: good sets vote from rng,
// bad sets through `adversary`, and bad representatives in the last round
// send `bad_bit`.
PipelineTrace simulate_pipeline(const Pipeline& plan, const CoordSet& bad, Rng& rng,
                                const BadVoter& adversary = {}, bool bad_bit = true);

}  // namespace coinflip
