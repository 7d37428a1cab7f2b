#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace coinflip {

// Exact rational with a power-of-two denominator: num / 2^exp.
//
// Every probability and influence computed from a truth table or an exact
// game tree has this shape, so identities such as
// Pr[f|_i = 1] = Pr[f = 1] + I_i(f) / 2 can be checked with ==.
// Values are kept normalized (num odd, or num == 0 with exp == 0).
// Magnitudes are expected to stay within [-4, 4] with exp <= 62.
class Dyadic {
 public:
  constexpr Dyadic() = default;

  // num / 2^exp
  static Dyadic of(std::int64_t num, int exp);
  static Dyadic zero() { return {}; }
  static Dyadic one() { return of(1, 0); }

  std::int64_t numerator() const { return num_; }
  int exponent() const { return exp_; }
  // 2^exp; only meaningful while exp <= 62.
  std::uint64_t denominator() const { return std::uint64_t{1} << exp_; }

  double to_double() const;
  // "num/den", or "num" when the denominator is 1.
  std::string str() const;

  Dyadic half() const { return of(num_, exp_ + 1); }

  friend Dyadic operator+(Dyadic a, Dyadic b);
  friend Dyadic operator-(Dyadic a, Dyadic b);
  friend bool operator==(const Dyadic& a, const Dyadic& b) = default;
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  // Exact comparison against p / q for q > 0.
  bool at_least(std::int64_t p, std::int64_t q) const;
  // Comparison against a double threshold; exact for dyadic thresholds.
  bool at_least(double threshold) const { return to_double() >= threshold; }

 private:
  std::int64_t num_ = 0;
  int exp_ = 0;
};

}  // namespace coinflip
