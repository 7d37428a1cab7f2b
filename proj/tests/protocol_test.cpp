#include <gtest/gtest.h>

#include <cmath>

#include "coinflip/error.hpp"
#include "coinflip/protocol.hpp"
#include "oracles.hpp"

using namespace coinflip;

namespace {

// 1-round coin protocol over the table f (one bit per player).
ProtocolSpec one_round(const BooleanFunction& f, std::string name = "fn") {
  ProtocolSpec p;
  p.name = std::move(name);
  p.players = f.arity();
  p.bits = {1};
  p.evaluate = [f](const Transcript& t) -> Outcome { return f(t.index(1)) ? 1 : 0; };
  return p;
}

ProtocolSpec constant_protocol(std::size_t players, Outcome o) {
  ProtocolSpec p;
  p.name = "const";
  p.players = players;
  p.bits = {1};
  p.evaluate = [o](const Transcript&) { return o; };
  return p;
}

// Parity of every transcript bit.
ProtocolSpec parity_all(std::size_t players, std::vector<int> bits) {
  ProtocolSpec p;
  p.name = "parity-all";
  p.players = players;
  p.bits = std::move(bits);
  p.evaluate = [](const Transcript& t) -> Outcome {
    unsigned x = 0;
    for (int i = 1; i <= t.rounds(); ++i)
      for (std::size_t pos = 0; pos < t.round_size(i); ++pos) x ^= t.bit(i, pos);
    return x;
  };
  return p;
}

ProtocolSpec leader_mod(std::size_t players) {
  ProtocolSpec p;
  p.name = "leader-mod";
  p.players = players;
  p.bits = {1};
  p.domain = Domain::leader;
  p.evaluate = [players](const Transcript& t) -> Outcome {
    return static_cast<Outcome>(t.index(1) % players) + 1;
  };
  return p;
}

ProtocolSpec leader_fixed(std::size_t players) {
  ProtocolSpec p;
  p.name = "leader-fixed";
  p.players = players;
  p.bits = {1};
  p.domain = Domain::leader;
  p.evaluate = [](const Transcript&) -> Outcome { return 1; };
  return p;
}

Dyadic q(std::int64_t num, int exp) { return Dyadic::of(num, exp); }

}  // namespace

TEST(Transcript, LayoutAndIndex) {
  Transcript t(3, {2, 1});
  EXPECT_EQ(t.round_size(1), 6u);
  EXPECT_EQ(t.total_bits(), 9u);
  t.set_message(1, 2, 0b11);
  EXPECT_TRUE(t.bit(1, 2));
  EXPECT_TRUE(t.bit(1, 3));
  EXPECT_EQ(t.message(1, 2), 3u);
  t.set_bit(2, 0, true);
  EXPECT_EQ(t.index(2), (0b001100ULL) | (1ULL << 6));
  Transcript u(3, {2, 1});
  u.set_from_index(2, t.index(2));
  EXPECT_EQ(u.index(2), t.index(2));
  EXPECT_EQ(t.truncated(1).rounds(), 1);
}

TEST(Transcript, WideRoundsUseSeveralWords) {
  Transcript t(100, {1});
  Rng rng(3);
  t.fill_random(1, rng);
  t.set_message(1, 100, 1);
  EXPECT_TRUE(t.bit(1, 99));
  EXPECT_THROW(t.index(1), CapacityError);
}

TEST(HonestRun, ParityIsUniform) {
  const auto p = one_round(builtin::parity(4));
  Rng rng(11);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += honest_run(p, rng);
  // chi-square with one degree of freedom, 99.9% quantile 10.83
  const double e = n / 2.0;
  const double chi = (ones - e) * (ones - e) / e * 2;
  EXPECT_LT(chi, 10.83);
}

TEST(HonestRun, ConstantAndMajority) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(honest_run(constant_protocol(3, 1), rng), 1u);
  const auto mc = monte_carlo_value(one_round(builtin::majority(5)), honest_strategy(), 1, 50000, 9);
  EXPECT_NEAR(mc.estimate, 0.5, mc.ci_halfwidth);
}

TEST(RunWithAdversary, CompletesParity) {
  const auto p = one_round(builtin::parity(4));
  AdversaryStrategy adv{{1}, [](int, const Transcript& t) {
                          unsigned x = 0;
                          for (std::size_t pos = 0; pos < t.round_size(1); ++pos) x ^= t.bit(1, pos);
                          return std::vector<std::uint64_t>{x ^ 1U};
                        }};
  Rng rng(4);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(run_with_adversary(p, adv, rng), 1u);
}

TEST(RunWithAdversary, EmptyCoalitionMatchesHonestSeedForSeed) {
  const auto p = one_round(builtin::random(6, 0.5, 3));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    EXPECT_EQ(honest_run(p, a), run_with_adversary(p, honest_strategy(), b));
  }
}

TEST(RunWithAdversary, MajorityConstantStrategy) {
  // Enumerate the four good patterns through a fixed transcript evaluation.
  const auto p = one_round(builtin::majority(3));
  const auto adv = constant_strategy({1}, 1);
  int hits = 0;
  for (std::uint64_t g = 0; g < 4; ++g) {
    Transcript t = p.blank_transcript();
    t.set_message(1, 2, g & 1U);
    t.set_message(1, 3, g >> 1);
    const auto msgs = adv.respond(1, t);
    t.set_message(1, 1, msgs[0]);
    hits += p.evaluate(t);
  }
  EXPECT_EQ(hits, 3);
}

TEST(RunWithAdversary, ShapeMismatchThrows) {
  const auto p = one_round(builtin::majority(3));
  AdversaryStrategy adv{{1, 2}, [](int, const Transcript&) { return std::vector<std::uint64_t>{1}; }};
  Rng rng(0);
  EXPECT_THROW(run_with_adversary(p, adv, rng), InvalidArgument);
  EXPECT_THROW(run_with_adversary(p, constant_strategy({4}, 1), rng), InvalidArgument);
}

TEST(ExactValue, Examples) {
  const auto maj = one_round(builtin::majority(3));
  EXPECT_EQ(exact_adversary_value(maj, {}, 1), q(1, 1));
  EXPECT_EQ(exact_adversary_value(one_round(builtin::parity(4)), {1}, 1), Dyadic::one());
  EXPECT_EQ(exact_adversary_value(maj, {1}, 1), q(3, 2));
  EXPECT_EQ(exact_adversary_value(one_round(builtin::majority(5)), {1}, 1), q(11, 4));
  EXPECT_THROW(exact_adversary_value(one_round(builtin::parity(23)), {}, 1), CapacityError);
  EXPECT_THROW(exact_adversary_value(maj, {4}, 1), InvalidArgument);
}

TEST(ExactValue, AgreesWithIndependentOracle) {
  const std::vector<ProtocolSpec> corpus{parity_all(3, {1, 1}), parity_all(2, {2, 1}),
                                         one_round(builtin::tribes(2, 2)), one_round(builtin::random(5, 0.5, 8))};
  for (const auto& p : corpus)
    for (const CoordSet& b : {CoordSet{}, CoordSet{1}, CoordSet{2}, CoordSet{1, 2}})
      for (Outcome o : {0u, 1u})
        EXPECT_EQ(exact_adversary_value(p, b, o).to_double(), oracle::game_value(p, b, o)) << p.name << b.str();
}

TEST(ExactValue, OneRoundMatchesRestriction) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = builtin::random(7, 0.5, seed);
    const auto p = one_round(f);
    for (const CoordSet& b : {CoordSet{2}, CoordSet{1, 5}, CoordSet{3, 4, 7}})
      for (int o : {0, 1})
        EXPECT_EQ(exact_adversary_value(p, b, o), prob(restrict_optimal(f, b, o), o));
  }
}

TEST(ExactValue, MonotoneInCoalition) {
  const auto p = parity_all(3, {1, 1});
  const auto f = builtin::random(8, 0.4, 2);
  const auto g = one_round(f);
  for (Outcome o : {0u, 1u}) {
    EXPECT_LE(exact_adversary_value(g, {3}, o), exact_adversary_value(g, {3, 6}, o));
    EXPECT_LE(exact_adversary_value(g, {3, 6}, o), exact_adversary_value(g, {1, 3, 6}, o));
    EXPECT_LE(exact_adversary_value(p, {}, o), exact_adversary_value(p, {2}, o));
  }
}

TEST(OptimalStrategy, RealizesExactValue) {
  const auto p = one_round(builtin::majority(5));
  const auto adv = optimal_strategy(p, {1, 2}, [](Outcome o) { return o == 1; });
  const auto mc = monte_carlo_value(p, adv, 1, 4000, 5);
  EXPECT_NEAR(mc.estimate, exact_adversary_value(p, {1, 2}, 1).to_double(), mc.ci_halfwidth);
}

TEST(OptimalPlay, ReachedTranscriptsCarryTheValue) {
  const auto p = parity_all(2, {1, 1});
  const auto bad = BitCoalition::of_players(p, {2});
  const auto play = optimal_play(p, bad, [](Outcome o) { return o == 1; });
  EXPECT_EQ(play.value, Dyadic::one());
  EXPECT_EQ(play.good_bits, 2);
  std::size_t reached = 0;
  for (std::size_t idx = 0; idx < play.reached.size(); ++idx) {
    if (!play.reached[idx]) continue;
    ++reached;
    EXPECT_EQ(__builtin_popcountll(idx) % 2, 1);
  }
  EXPECT_EQ(reached, 4u);
}

TEST(MonteCarlo, ConstantHasNoVariance) {
  const auto mc = monte_carlo_value(constant_protocol(4, 1), constant_strategy({2}, 0), 1, 1000, 3);
  EXPECT_EQ(mc.estimate, 1.0);
  EXPECT_EQ(mc.hits, 1000u);
  EXPECT_GT(mc.ci_halfwidth, 0);
}

TEST(MonteCarlo, HonestParityConcentrates) {
  const auto mc = monte_carlo_value(one_round(builtin::parity(8)), honest_strategy(), 1, 1000000, 77);
  EXPECT_NEAR(mc.estimate, 0.5, 0.003);
}

TEST(MonteCarlo, FloodingMajorityMatchesBinomialTail) {
  // majority(101) with 10 bad players voting 1: wins iff >= 41 of 91 good bits are 1.
  ProtocolSpec p;
  p.name = "majority-101";
  p.players = 101;
  p.bits = {1};
  p.evaluate = [](const Transcript& t) -> Outcome {
    std::size_t ones = 0;
    for (std::size_t pos = 0; pos < 101; ++pos) ones += t.bit(1, pos);
    return ones >= 51;
  };
  std::vector<int> members{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto mc = monte_carlo_value(p, constant_strategy(CoordSet(members), 1), 1, 20000, 12);
  double tail = 0;
  for (int j = 41; j <= 91; ++j) tail += std::exp(std::lgamma(92) - std::lgamma(j + 1) - std::lgamma(92 - j) - 91 * std::log(2));
  EXPECT_NEAR(mc.estimate, tail, mc.ci_halfwidth);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  const auto p = one_round(builtin::random(10, 0.5, 1));
  setenv("COINFLIP_LAB_THREADS", "1", 1);
  const auto a = monte_carlo_value(p, constant_strategy({1}, 1), 1, 5000, 42);
  setenv("COINFLIP_LAB_THREADS", "4", 1);
  const auto b = monte_carlo_value(p, constant_strategy({1}, 1), 1, 5000, 42);
  unsetenv("COINFLIP_LAB_THREADS");
  EXPECT_EQ(a.hits, b.hits);
}

TEST(InducedRoundFunction, Examples) {
  const auto p = parity_all(4, {1, 1});
  Transcript prefix = p.blank_transcript();
  prefix.set_message(1, 3, 1);
  // Round-1 parity is 1, so the induced table is the negated parity.
  EXPECT_EQ(induced_round_function(p, prefix), builtin::parity(4).negated());
  prefix.set_message(1, 2, 1);
  EXPECT_EQ(induced_round_function(p, prefix), builtin::parity(4));

  ProtocolSpec first;
  first.name = "first-bit";
  first.players = 3;
  first.bits = {1, 1};
  first.evaluate = [](const Transcript& t) -> Outcome { return t.bit(1, 0); };
  Transcript one = first.blank_transcript();
  one.set_message(1, 1, 1);
  EXPECT_EQ(induced_round_function(first, one), BooleanFunction::constant(3, true));
  EXPECT_THROW(induced_round_function(one_round(builtin::parity(3)), one), InvalidArgument);
}

TEST(ProtocolTable, OneRoundRoundTrip) {
  const auto f = builtin::random(9, 0.5, 21);
  EXPECT_EQ(protocol_table(one_round(f)), f);
}

TEST(LeaderToCoin, FixedLeader) {
  const auto coin = leader_to_coinflip(leader_fixed(3));
  EXPECT_EQ(coin.rounds(), 2);
  EXPECT_EQ(coin.bits.back(), 1);
  EXPECT_EQ(exact_adversary_value(coin, {}, 1), q(1, 1));
  EXPECT_EQ(exact_adversary_value(coin, {1}, 1), Dyadic::one());
  EXPECT_THROW(leader_to_coinflip(one_round(builtin::parity(2))), InvalidArgument);
}

TEST(LeaderToCoin, CoinBiasBoundedByGoodLeaderProbability) {
  for (const auto& leader : {leader_mod(3), leader_fixed(3), leader_mod(4)}) {
    const auto coin = leader_to_coinflip(leader);
    for (int b = 1; b <= static_cast<int>(leader.players); ++b) {
      const CoordSet bad{b};
      const double good_leader = 1 - exact_bad_leader_value(leader, bad).to_double();
      for (Outcome o : {0u, 1u}) EXPECT_LE(exact_adversary_value(coin, bad, o).to_double(), 1 - good_leader / 2);
    }
  }
}

TEST(LeaderToCoin, BiasedCoinImpliesBadLeader) {
  // Contrapositive direction: a coin value of 1 - x forces the good-leader
  // probability down to at most 2x.
  const auto leader = leader_mod(4);
  const auto coin = leader_to_coinflip(leader);
  for (const CoordSet& bad : {CoordSet{1}, CoordSet{1, 2}, CoordSet{2, 4}}) {
    const double x = 1 - exact_adversary_value(coin, bad, 1).to_double();
    EXPECT_LE(1 - exact_bad_leader_value(leader, bad).to_double(), 2 * x + 1e-12);
  }
}

TEST(Resilience, Examples) {
  const auto parity = resilience_check(one_round(builtin::parity(5)), 1, 0.01);
  EXPECT_FALSE(parity.resilient);
  EXPECT_EQ(parity.value, 1.0);

  const auto maj = resilience_check(one_round(builtin::majority(5)), 1, 0.1);
  EXPECT_TRUE(maj.resilient);
  EXPECT_EQ(*maj.exact_value, q(11, 4));
  EXPECT_EQ(maj.worst_coalition, CoordSet{1});
  EXPECT_EQ(maj.coalitions_checked, 5u);
  EXPECT_FALSE(resilience_check(one_round(builtin::majority(5)), 1, 0.4).resilient);

  EXPECT_FALSE(resilience_check(constant_protocol(3, 0), 0, 0.01).resilient);

  ResilienceOptions tight;
  tight.max_coalitions = 3;
  EXPECT_THROW(resilience_check(one_round(builtin::majority(5)), 2, 0.1, tight), CapacityError);
}

TEST(Resilience, MonteCarloLowerBoundsExact) {
  ResilienceOptions mc;
  mc.mode = EvalMode::monte_carlo;
  mc.trials = 4000;
  mc.seed = 8;
  const auto p = one_round(builtin::majority(5));
  const auto r = resilience_check(p, 1, 0.1, mc);
  EXPECT_FALSE(r.exact_value.has_value());
  EXPECT_NEAR(r.value, 11.0 / 16, r.ci_halfwidth);
  const auto leader = resilience_check(leader_mod(3), 1, 0.1);
  EXPECT_EQ(leader.value, 0.75);
}
