#include <gtest/gtest.h>

#include "coinflip/boolfn.hpp"
#include "coinflip/error.hpp"
#include "coinflip/rng.hpp"
#include "oracles.hpp"

using namespace coinflip;

namespace {

Dyadic q(std::int64_t num, int exp) { return Dyadic::of(num, exp); }

BooleanFunction random_fn(int n, std::uint64_t seed) { return builtin::random(n, 0.5, seed); }

}  // namespace

TEST(Dyadic, ArithmeticAndOrdering) {
  EXPECT_EQ(q(2, 2), q(1, 1));
  EXPECT_EQ(q(1, 1) + q(1, 2), q(3, 2));
  EXPECT_EQ(q(1, 0) - q(1, 3), q(7, 3));
  EXPECT_LT(q(7, 4), q(1, 1));
  EXPECT_TRUE(q(3, 2).at_least(3, 4));
  EXPECT_FALSE(q(5, 3).at_least(2, 3));
  EXPECT_EQ(q(11, 4).str(), "11/16");
  EXPECT_EQ(Dyadic::one().str(), "1");
  EXPECT_EQ(Dyadic::zero().str(), "0");
}

TEST(CoordSet, SortsAndRejectsDuplicates) {
  CoordSet s{3, 1};
  EXPECT_EQ(s.str(), "{1,3}");
  EXPECT_THROW(CoordSet({1, 1}), InvalidArgument);
  EXPECT_THROW(CoordSet({0}), InvalidArgument);
  EXPECT_THROW(s.check_within(2), InvalidArgument);
  EXPECT_EQ(s.united(CoordSet{2}).str(), "{1,2,3}");
}

TEST(BooleanFunction, ArityCap) {
  EXPECT_THROW(BooleanFunction(kMaxArity + 1), CapacityError);
  EXPECT_THROW(make_builtin("parity:25"), CapacityError);
}

TEST(Prob, Examples) {
  EXPECT_EQ(prob(builtin::parity(3), 1), q(1, 1));
  EXPECT_EQ(prob(BooleanFunction::constant(5, false), 1), Dyadic::zero());
  EXPECT_EQ(prob(builtin::tribes(2, 2), 1), q(7, 4));
  EXPECT_EQ(prob(builtin::tribes(2, 2), 1), oracle::brute_prob(builtin::tribes(2, 2), 1));
}

TEST(Influence, Examples) {
  const auto d = builtin::dictator(3, 1);
  EXPECT_EQ(influence(d, 1), Dyadic::one());
  EXPECT_EQ(influence(d, 2), Dyadic::zero());
  for (int n : {1, 4, 7})
    for (int i = 1; i <= n; ++i) EXPECT_EQ(influence(builtin::parity(n), i), Dyadic::one());
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(influence(builtin::majority(3), i), q(1, 1));
  EXPECT_THROW(influence(d, 4), InvalidArgument);
  EXPECT_THROW(influence(d, 0), InvalidArgument);
}

TEST(Influence, MatchesBruteForceOnWideTables) {
  // Coordinates 7+ use the cross-word path.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = random_fn(9, seed);
    for (int i = 1; i <= 9; ++i) EXPECT_EQ(influence(f, i), oracle::brute_influence(f, i)) << i;
  }
}

TEST(Influence, MajorityEqualsCentralPivot) {
  // Pivotal iff the other n-1 bits split evenly: C(n-1, (n-1)/2) / 2^(n-1).
  for (int n : {3, 5, 7, 9, 11}) {
    const auto f = builtin::majority(n);
    const Dyadic pivot = q(static_cast<std::int64_t>(oracle::binomial(n - 1, (n - 1) / 2)), n - 1);
    for (int i = 1; i <= n; ++i) EXPECT_EQ(influence(f, i), pivot);
  }
}

TEST(RestrictFix, Examples) {
  EXPECT_EQ(restrict_fix(builtin::or_fn(2), 1, 1), BooleanFunction::constant(1, true));
  EXPECT_EQ(restrict_fix(builtin::parity(3), 2, 0), builtin::parity(2));
  EXPECT_EQ(restrict_fix(builtin::majority(3), 1, 1), builtin::or_fn(2));
  const auto c = restrict_fix(builtin::dictator(1, 1), 1, 1);
  EXPECT_TRUE(c.is_zero_ary());
  EXPECT_TRUE(c(0));
}

TEST(RestrictOptimal, Examples) {
  EXPECT_EQ(restrict_optimal(builtin::or_fn(3), {1}, 1), BooleanFunction::constant(2, true));
  for (int i = 1; i <= 5; ++i)
    EXPECT_EQ(restrict_optimal(builtin::parity(5), {i}, 1), BooleanFunction::constant(4, true));
  const auto g = restrict_optimal(builtin::majority(3), {1}, 1);
  EXPECT_EQ(g, builtin::or_fn(2));
  EXPECT_EQ(prob(g, 1), q(3, 2));
  EXPECT_THROW(restrict_optimal(builtin::or_fn(2), {1, 2}, 1), InvalidArgument);
}

TEST(RestrictOptimal, MatchesExistentialOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_fn(8, 100 + trial);
    std::vector<int> members;
    for (int i = 1; i <= 8; ++i)
      if (rng.below(3) == 0) members.push_back(i);
    if (members.size() == 8) members.pop_back();
    const CoordSet s(members);
    for (int o : {0, 1}) EXPECT_EQ(restrict_optimal(f, s, o), oracle::existential_restrict(f, s, o));
  }
}

TEST(CanBias, Examples) {
  EXPECT_TRUE(can_bias(builtin::majority(3), {1, 2}, 1, 0));
  EXPECT_FALSE(can_bias(builtin::dictator(2, 1), {2}, 1, 0.1));
  EXPECT_TRUE(can_bias(builtin::tribes(2, 2), {1, 2}, 1, 0));
}

TEST(Properties, GainIdentity) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 2 + static_cast<int>(seed % 11);
    const auto f = random_fn(n, seed);
    for (int i = 1; i <= n; ++i)
      EXPECT_EQ(prob(restrict_optimal(f, {i}, 1), 1), prob(f, 1) + influence(f, i).half());
  }
}

TEST(Properties, MonotoneInS) {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_fn(10, seed);
    std::vector<int> order{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    for (int o : {0, 1}) {
      Dyadic last = prob(f, o);
      std::vector<int> members;
      for (int j = 0; j < 9; ++j) {
        members.push_back(order[j]);
        const Dyadic now = prob(restrict_optimal(f, CoordSet(members), o), o);
        EXPECT_GE(now, last);
        last = now;
      }
    }
  }
}

TEST(Properties, FlipDualityAndFixAveraging) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_fn(7, seed);
    for (int i = 1; i <= 7; ++i) {
      EXPECT_EQ(influence(f, i), influence(f.negated(), i));
      const Dyadic avg = (prob(restrict_fix(f, i, 0), 1) + prob(restrict_fix(f, i, 1), 1)).half();
      EXPECT_EQ(avg, prob(f, 1));
    }
  }
}

TEST(InfluenceSumCheck, Examples) {
  const auto p = influence_sum_check(builtin::parity(4), 0.1, 1.0 / 16);
  EXPECT_FALSE(p.applicable);
  EXPECT_TRUE(p.holds);
  const auto c = influence_sum_check(BooleanFunction::constant(4, true), 0.1, 1.0 / 16);
  EXPECT_FALSE(c.applicable);
  EXPECT_THROW(influence_sum_check(builtin::parity(4), 0.5, 0.1), InvalidArgument);
  EXPECT_THROW(influence_sum_check(builtin::parity(4), 0.1, 0.125), InvalidArgument);
  // Majority(11): every influence ~0.246 > 1/16.
  EXPECT_FALSE(influence_sum_check(builtin::majority(11), 0.1, 1.0 / 16).applicable);
  // Four tribes of width 5: influences (1/16)(31/32)^3 < 1/16, Pr[1] ~ 0.119.
  const auto t = influence_sum_check(builtin::tribes(4, 5), 0.1, 1.0 / 16);
  EXPECT_TRUE(t.applicable);
  EXPECT_TRUE(t.holds);
  EXPECT_GE(t.sum.to_double(), t.bound);
}

TEST(Builtins, Examples) {
  EXPECT_TRUE(make_builtin("majority:3")(0b011));
  EXPECT_FALSE(make_builtin("tribes:2x2")(0));
  EXPECT_TRUE(make_builtin("tribes:2x2")(0b1100));
  EXPECT_FALSE(make_builtin("tribes:2x2")(0b0110));
  EXPECT_EQ(make_builtin("dictator:5:2"), builtin::dictator(5, 2));
  EXPECT_EQ(make_builtin("recmaj3:2").arity(), 9);
  EXPECT_EQ(prob(make_builtin("recmaj3:2"), 1), q(1, 1));
  EXPECT_EQ(make_builtin("const1:3"), BooleanFunction::constant(3, true));
  EXPECT_EQ(make_builtin("random:10:0.5:42"), builtin::random(10, 0.5, 42));
  for (const char* bad : {"", "parity", "parity:x", "majority:4", "tribes:2", "nope:3", "dictator:3:4",
                          "random:5:1.5:1", "parity:3:1"})
    EXPECT_THROW(make_builtin(bad), InvalidArgument) << bad;
}

TEST(Builtins, RandomDensityConcentrates) {
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const double p = prob(builtin::random(10, 0.5, seed), 1).to_double();
    if (p >= 0.4 && p <= 0.6) ++inside;
  }
  EXPECT_GE(inside, 198);
}

TEST(Serialization, RoundTrip) {
  const auto zero_ary = restrict_fix(builtin::dictator(1, 1), 1, 1);
  EXPECT_EQ(deserialize(serialize(zero_ary)), zero_ary);
  for (int n : {1, 2, 3, 5, 9}) {
    const auto f = random_fn(n, 7 + n);
    const std::string text = serialize(f);
    EXPECT_EQ(deserialize(text), f);
  }
  EXPECT_EQ(serialize(builtin::and_fn(3)), "boolfn v1 arity=3\n08\n");
  EXPECT_EQ(serialize(builtin::or_fn(2)), "boolfn v1 arity=2\ne\n");
  EXPECT_THROW(deserialize("boolfn v1 arity=2\nee\n"), InvalidArgument);
  EXPECT_THROW(deserialize("boolfn v2 arity=2\ne\n"), InvalidArgument);
  EXPECT_THROW(deserialize("boolfn v1 arity=1\nf\n"), InvalidArgument);
}
