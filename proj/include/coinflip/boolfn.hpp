#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coinflip/dyadic.hpp"

namespace coinflip {

// Hard cap on truth-table arity: 2^24 bits = 2 MiB per table.
inline constexpr int kMaxArity = 24;

// Strictly increasing list of 1-based coordinates.
class CoordSet {
 public:
  CoordSet() = default;
  // Sorts the input; throws InvalidArgument on duplicates or members < 1.
  CoordSet(std::vector<int> members);
  CoordSet(std::initializer_list<int> members) : CoordSet(std::vector<int>(members)) {}

  const std::vector<int>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(int i) const;
  int max() const { return members_.empty() ? 0 : members_.back(); }

  CoordSet united(const CoordSet& other) const;
  // Throws InvalidArgument if a member exceeds `arity`.
  void check_within(int arity) const;

  // "{1,3,4}"
  std::string str() const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  friend bool operator==(const CoordSet&, const CoordSet&) = default;

 private:
  std::vector<int> members_;
};

// A function {0,1}^arity -> {0,1} stored as a bit-packed truth table.
//
// Bit z of the table is f(z), where coordinate 1 is the least significant
// bit of z. Arity 0 is the constant-function value (a single stored bit);
// it only arises from restricting away every coordinate.
class BooleanFunction {
 public:
  BooleanFunction() : BooleanFunction(0) {}
  // All-zero function of the given arity.
  explicit BooleanFunction(int arity);

  static BooleanFunction constant(int arity, bool value);
  template <class Fn>
  static BooleanFunction from_predicate(int arity, Fn&& fn) {
    BooleanFunction f(arity);
    for (std::uint64_t z = 0; z < f.size(); ++z) f.set(z, fn(z));
    return f;
  }

  int arity() const { return arity_; }
  std::uint64_t size() const { return std::uint64_t{1} << arity_; }
  bool is_zero_ary() const { return arity_ == 0; }

  bool operator()(std::uint64_t z) const { return (words_[z >> 6] >> (z & 63)) & 1U; }
  void set(std::uint64_t z, bool v);

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  std::uint64_t count_ones() const;
  bool is_constant() const;
  BooleanFunction negated() const;

  // Keeps the arity but hands coordinate i to the pointwise-optimal adversary
  // for outcome o: afterwards f no longer depends on i, and
  // f'(z) = OR (o = 1) / AND (o = 0) of f over both values of bit i.
  // Restricting a set this way and then dropping the set's coordinates is
  // exactly restrict_optimal.
  void absorb(int i, int o);

  friend bool operator==(const BooleanFunction&, const BooleanFunction&) = default;

 private:
  int arity_ = 0;
  std::vector<std::uint64_t> words_;
};

// Pr_z[f(z) = o], exact.
Dyadic prob(const BooleanFunction& f, int o);

// Pr_z[f(z) != f(z with bit i flipped)], exact. Throws on i outside [1, arity].
Dyadic influence(const BooleanFunction& f, int i);
std::vector<Dyadic> influences(const BooleanFunction& f);

// f with coordinate i fixed to b; the remaining coordinates keep their order.
BooleanFunction restrict_fix(const BooleanFunction& f, int i, int b);

// The bias-maximizing adversary on S toward o: g(y) = o iff some assignment
// of the S coordinates makes f(x, y) = o. Arity drops by |S|.
// Throws if S covers every coordinate.
BooleanFunction restrict_optimal(const BooleanFunction& f, const CoordSet& s, int o);

// Same adversary, but keeps the arity (S coordinates become irrelevant).
BooleanFunction absorb_all(const BooleanFunction& f, const CoordSet& s, int o);

// Drops the coordinates in s (which f must not depend on) and renumbers the rest.
BooleanFunction project_out(const BooleanFunction& f, const CoordSet& s);

// True iff S can force o with probability at least 1 - eps.
bool can_bias(const BooleanFunction& f, const CoordSet& s, int o, double eps);

struct InfluenceSumCheck {
  bool applicable = false;
  bool holds = true;
  Dyadic sum;
  double bound = 0;  // gamma * log2(1/theta) / 20
};

// Heavy-or-spread influence inequality: when gamma <= Pr[f=1] <= 1-gamma and
// every influence is <= theta, the influences sum to at least
// gamma * log2(1/theta) / 20. Requires 0 < gamma < 1/2 and 0 < theta < 1/8.
InfluenceSumCheck influence_sum_check(const BooleanFunction& f, double gamma, double theta);

namespace builtin {

BooleanFunction parity(int n);
BooleanFunction majority(int n);  // n odd
BooleanFunction dictator(int n, int i);
BooleanFunction or_fn(int n);
BooleanFunction and_fn(int n);
// OR of `count` ANDs; tribe t covers coordinates t*width+1 .. (t+1)*width.
BooleanFunction tribes(int count, int width);
// Depth-d ternary tree of majority gates over 3^d leaves.
BooleanFunction recursive_majority3(int depth);
// Each table bit is 1 independently with probability p. Draws come from
// Rng(seed) in table order: bit z is 1 iff the z-th uniform() < p.
BooleanFunction random(int n, double p, std::uint64_t seed);

}  // namespace builtin

// Parses builtin names: parity:5, majority:3, dictator:5:2, or:3, and:3,
// tribes:4x3 (4 tribes of width 3), recmaj3:2, random:12:0.5:42, const0:4, const1:4.
BooleanFunction make_builtin(std::string_view name);

// Text format: "boolfn v1 arity=<n>\n" then 2^n bits as lowercase hex,
// least-significant nibble first, then "\n".
std::string serialize(const BooleanFunction& f);
BooleanFunction deserialize(std::string_view text);

}  // namespace coinflip
