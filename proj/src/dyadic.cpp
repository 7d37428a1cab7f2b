#include "coinflip/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace coinflip {

Dyadic Dyadic::of(std::int64_t num, int exp) {
  if (exp < 0) throw std::invalid_argument("Dyadic: negative exponent");
  Dyadic d;
  if (num == 0) return d;
  while ((num & 1) == 0 && exp > 0) {
    num /= 2;
    --exp;
  }
  if (exp > 62) throw std::overflow_error("Dyadic: denominator exceeds 2^62");
  d.num_ = num;
  d.exp_ = exp;
  return d;
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(num_), -exp_); }

std::string Dyadic::str() const {
  if (exp_ == 0) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(denominator());
}

namespace {

// Align both numerators to the larger exponent.
std::pair<__int128, __int128> aligned(const Dyadic& a, const Dyadic& b, int& exp) {
  exp = std::max(a.exponent(), b.exponent());
  __int128 x = static_cast<__int128>(a.numerator()) << (exp - a.exponent());
  __int128 y = static_cast<__int128>(b.numerator()) << (exp - b.exponent());
  return {x, y};
}

Dyadic from_wide(__int128 num, int exp) {
  while (exp > 0 && (num & 1) == 0 && num != 0) {
    num /= 2;
    --exp;
  }
  if (num > INT64_MAX || num < INT64_MIN) throw std::overflow_error("Dyadic: numerator overflow");
  return Dyadic::of(static_cast<std::int64_t>(num), num == 0 ? 0 : exp);
}

}  // namespace

Dyadic operator+(Dyadic a, Dyadic b) {
  int exp = 0;
  auto [x, y] = aligned(a, b, exp);
  return from_wide(x + y, exp);
}

Dyadic operator-(Dyadic a, Dyadic b) {
  int exp = 0;
  auto [x, y] = aligned(a, b, exp);
  return from_wide(x - y, exp);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  int exp = 0;
  auto [x, y] = aligned(a, b, exp);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool Dyadic::at_least(std::int64_t p, std::int64_t q) const {
  if (q <= 0) throw std::invalid_argument("Dyadic::at_least: non-positive denominator");
  // num / 2^exp >= p / q  <=>  num * q >= p * 2^exp
  __int128 lhs = static_cast<__int128>(num_) * q;
  __int128 rhs = static_cast<__int128>(p) << exp_;
  return lhs >= rhs;
}

}  // namespace coinflip
