#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coinflip/boolfn.hpp"
#include "coinflip/protocol.hpp"
#include "coinflip/rng.hpp"

namespace coinflip {

enum class ParamMode { desk, paper };

// Parameters of the biasing algorithms. In desk mode h, c and r are taken as
// given (r = 0 means the step-budget formula, clamped to the coordinate count).
// Paper mode derives them from the asymptotic schedule and rejects the
// degenerate values that schedule produces at small sizes.
struct AttackParams {
  ParamMode mode = ParamMode::desk;
  double gamma = 0.25;
  int h = 4;       // heavy-set budget
  int c = 2;       // chisel floor
  int r = 0;       // process step budget
  double delta = 1.0 / 3;
  double boost_target = 0.75;  // target of the recursive re-boosts
  int candidates = 50;         // ordered random sets tried by the family search
  std::uint64_t seed = 0;
  int budget = kExactBudget;
};

// Concrete values used for one process run.
struct ResolvedParams {
  int h = 0;
  int c = 0;
  int r = 0;
  double gamma = 0;
  double delta = 0;
  // Heavy threshold min(2/h, 1) as an exact fraction num/den.
  std::int64_t heavy_num = 0;
  std::int64_t heavy_den = 1;
};

// Step budget ceil(100 * coords * log2(1/delta) / (gamma * log2(h/2))),
// clamped to coords; h <= 2 gives coords.
int process_step_budget(int coords, double gamma, double delta, int h);

// Resolves params for a run over `coords` coordinates inside a k-round
// protocol (k = 1 for plain functions) at bias target `gamma`.
// Throws InvalidArgument on out-of-range values or degenerate paper-mode values.
ResolvedParams resolve_params(const AttackParams& params, int coords, int k, double gamma);

enum class StepCase { heavy, random, greedy };
const char* to_string(StepCase c);

struct ProcessStep {
  int coord = 0;
  StepCase tag = StepCase::random;
  Dyadic influence;  // X_j: influence of coord on the current restriction
  Dyadic z;          // Z_j = X_1 + ... + X_j
  Dyadic prob;       // Pr[restriction = o] after the step
};

struct ProcessTrace {
  Dyadic initial_prob;
  std::vector<ProcessStep> steps;
};

struct GreedyResult {
  CoordSet b;
  Dyadic final_prob;
  ProcessTrace trace;
};

// Repeatedly hands the most influential coordinate of the current optimal
// restriction (ties to the lowest index) to the adversary until
// Pr[f|_B = o] >= 1 - gamma. Throws NotEnoughMass when Pr[f = o] < gamma.
GreedyResult kkl_greedy(const BooleanFunction& f, int o, double gamma);

// Same loop, starting from coordinates already owned and stopping at
// `target`; no mass precondition.
GreedyResult greedy_extend(const BooleanFunction& f, int o, double target, const CoordSet& initial);

struct ProcessResult {
  CoordSet b_r;
  CoordSet b_h;
  bool success = false;
  Dyadic final_prob;
  ProcessTrace trace;
};

// Semi-random process: at most r steps, stopping once Pr >= 1 - gamma. A
// coordinate with influence >= min(2/h, 1) on the current restriction goes
// to B_H (largest influence, ties to the lowest index); otherwise a uniformly
// random unused coordinate goes to B_R.
ProcessResult semi_random_process(const BooleanFunction& f, int o, const AttackParams& params, Rng& rng);

// The derandomized variant: the random case takes the earliest element of
// `order` not yet used; the run fails if `order` is exhausted.
ProcessResult ordered_process(const BooleanFunction& f, int o, const ResolvedParams& rp,
                              const std::vector<int>& order);

struct FamilyMember {
  BooleanFunction f;
  int o = 1;
};

struct FamilyResult {
  CoordSet b_r;                            // R elements used by covered members
  std::vector<int> order;                  // the winning ordered random set
  std::vector<std::optional<CoordSet>> b_h;  // per member; nullopt = not covered
  double coverage = 0;
  std::size_t covered = 0;
  int candidate = 0;  // index of the winning candidate
  int r = 0;
  // Every covered member re-checked with can_bias(f, B_R u B_H(f), o, gamma).
  bool verified = false;
};

// Samples `params.candidates` ordered random sets of size r, runs the ordered
// process for every member under each, and keeps the candidate covering the
// most members (ties: smaller B_R, then lower index). Candidate i draws its
// order from Rng(Rng::derive(params.seed, i)).
FamilyResult family_common_set(const std::vector<FamilyMember>& family, const AttackParams& params);

// Same search with explicit resolved parameters and seed.
FamilyResult family_common_set(const std::vector<FamilyMember>& family, const ResolvedParams& rp, int candidates,
                               std::uint64_t seed);

struct ChiselIteration {
  int slot = 0;  // j
  std::size_t size_before = 0;
  std::size_t size_after = 0;
  int attempts = 0;
  Dyadic mass_kept;    // Pr[g != bot] right after the split
  Dyadic mass_boosted; // after the re-boost
  std::size_t b_i_bits = 0;
};

// One level of the k-round algorithm (k >= 2).
struct LevelTrace {
  int rounds = 0;
  double gamma = 0;
  std::size_t prefixes = 0;
  std::size_t family_size = 0;
  Dyadic family_mass;       // |F| / #prefixes
  Dyadic covered_mass;      // Pr[g != bot] after step 1(b)
  FamilyResult family;
  Dyadic mass_after_first_boost;
  std::vector<ChiselIteration> chisel;
  std::vector<CoordSet> c_sets;  // C_1..C_h at the end of the loop
  Dyadic mass_after_final_boost;
  CoordSet b_r;  // round-k coordinates (1-based bit positions)
  CoordSet b_h;
  std::vector<LevelTrace> nested;  // recursive calls on (k-1)-round protocols
};

struct AttackReport {
  std::string command;
  std::string target;
  double gamma = 0;
  AttackParams params;
  // Player-level coalition parts. For the multi-bit attack these are owners
  // of the corrupted bits.
  CoordSet b_r, b_h, b_i, b;
  BitCoalition bits;  // bit-level coalition (protocol attacks)
  std::size_t bit_count = 0;
  // Lower bound from the attack's own bookkeeping (never the reported value).
  std::optional<double> claimed_value;
  std::optional<Dyadic> bit_level_value; // oracle, adversary owning exactly `bits`
  Dyadic verified_value;                 // oracle, adversary owning all bits of `b`
  bool success = false;
  double budget_bound = 0;  // C * l / (gamma * log^(k) l), C = 1e7
  std::optional<GreedyResult> greedy;
  std::optional<ProcessResult> process;
  std::optional<FamilyResult> family;
  std::optional<LevelTrace> level;
};

// k-round coin protocol with one bit per player per round. k = 1 is
// kkl_greedy on the protocol table. The returned value is recomputed by
// exact_adversary_value. Throws NotEnoughMass, CapacityError, or
// AssertionFailure when an inequality of the analysis fails at runtime.
AttackReport bias_protocol(const ProtocolSpec& p, const AttackParams& params);

// Runs the algorithm on the bit-level view (r_i bits per player), then hands
// every player owning a corrupted bit to the adversary.
AttackReport bias_protocol_multibit(const ProtocolSpec& p, const AttackParams& params);

struct ProbeRow {
  std::string protocol;
  std::size_t players = 0;
  int rounds = 0;
  std::size_t coalition = 0;
  double fraction = 0;
  Dyadic value;
  bool within_budget = false;
  std::string error;  // non-empty when the attack did not run
};

// bias_protocol over `corpus`; within_budget means |B| <= budget_fraction * l
// and value >= 1 - gamma.
std::vector<ProbeRow> round_lb_probe(const std::vector<ProtocolSpec>& corpus, double budget_fraction,
                                     const AttackParams& params);

}  // namespace coinflip
