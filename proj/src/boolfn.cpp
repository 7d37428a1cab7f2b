#include "coinflip/boolfn.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

#include "coinflip/error.hpp"
#include "coinflip/rng.hpp"

namespace coinflip {

namespace {

// Bits where coordinate j+1 (bit j of the index) is 1, for j < 6.
constexpr std::uint64_t kVarMaskPos[6] = {
    0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
    0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL};

std::uint64_t table_mask(int arity) {
  return arity >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << arity)) - 1;
}

void check_coordinate(const BooleanFunction& f, int i) {
  if (i < 1 || i > f.arity())
    throw InvalidArgument("coordinate " + std::to_string(i) + " outside [1, " +
                          std::to_string(f.arity()) + "]");
}

void check_bit(int o, const char* what) {
  if (o != 0 && o != 1) throw InvalidArgument(std::string(what) + " must be 0 or 1");
}

// Index z of the full table whose `kept_bits` positions hold the bits of y in
// order; every other bit is zero.
std::uint64_t scatter(std::uint64_t y, const std::vector<int>& kept_bits) {
  std::uint64_t z = 0;
  for (std::size_t k = 0; k < kept_bits.size(); ++k) z |= ((y >> k) & 1U) << kept_bits[k];
  return z;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T parse_number(std::string_view s, std::string_view context) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("cannot parse '" + std::string(s) + "' in '" + std::string(context) + "'");
  return value;
}

double parse_double(std::string_view s, std::string_view context) {
  std::string copy(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(copy, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != copy.size() || copy.empty())
    throw InvalidArgument("cannot parse '" + copy + "' in '" + std::string(context) + "'");
  return v;
}

void check_arity(long long n) {
  if (n < 1 || n > kMaxArity)
    throw CapacityError("arity " + std::to_string(n) + " outside [1, " + std::to_string(kMaxArity) +
                        "]");
}

}  // namespace

// --- CoordSet ---------------------------------------------------------------

CoordSet::CoordSet(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (members_[k] < 1) throw InvalidArgument("coordinate sets are 1-based");
    if (k > 0 && members_[k] == members_[k - 1])
      throw InvalidArgument("duplicate coordinate " + std::to_string(members_[k]));
  }
}

bool CoordSet::contains(int i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

CoordSet CoordSet::united(const CoordSet& other) const {
  std::vector<int> out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                 std::back_inserter(out));
  return CoordSet(std::move(out));
}

void CoordSet::check_within(int arity) const {
  if (!members_.empty() && members_.back() > arity)
    throw InvalidArgument("coordinate " + std::to_string(members_.back()) + " outside [1, " +
                          std::to_string(arity) + "]");
}

std::string CoordSet::str() const {
  std::string s = "{";
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(members_[k]);
  }
  return s + "}";
}

// --- BooleanFunction --------------------------------------------------------

BooleanFunction::BooleanFunction(int arity) : arity_(arity) {
  if (arity < 0 || arity > kMaxArity)
    throw CapacityError("arity " + std::to_string(arity) + " exceeds MAX_ARITY " +
                        std::to_string(kMaxArity));
  words_.assign(arity >= 6 ? (std::size_t{1} << (arity - 6)) : 1, 0);
}

BooleanFunction BooleanFunction::constant(int arity, bool value) {
  BooleanFunction f(arity);
  if (value) {
    std::fill(f.words_.begin(), f.words_.end(), ~std::uint64_t{0});
    f.words_[0] &= table_mask(arity);
  }
  return f;
}

void BooleanFunction::set(std::uint64_t z, bool v) {
  const std::uint64_t bit = std::uint64_t{1} << (z & 63);
  if (v)
    words_[z >> 6] |= bit;
  else
    words_[z >> 6] &= ~bit;
}

std::uint64_t BooleanFunction::count_ones() const {
  std::uint64_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

bool BooleanFunction::is_constant() const {
  const auto ones = count_ones();
  return ones == 0 || ones == size();
}

BooleanFunction BooleanFunction::negated() const {
  BooleanFunction g = *this;
  for (auto& w : g.words_) w = ~w;
  if (arity_ < 6) g.words_[0] &= table_mask(arity_);
  return g;
}

void BooleanFunction::absorb(int i, int o) {
  check_coordinate(*this, i);
  check_bit(o, "outcome");
  const int j = i - 1;
  if (j < 6) {
    const unsigned s = 1U << j;
    const std::uint64_t pos = kVarMaskPos[j];
    for (auto& x : words_) {
      const std::uint64_t lo = x & ~pos;
      const std::uint64_t hi = (x & pos) >> s;
      const std::uint64_t m = o ? (lo | hi) : (lo & hi);
      x = m | (m << s);
    }
    if (arity_ < 6) words_[0] &= table_mask(arity_);
    return;
  }
  const std::size_t stride = std::size_t{1} << (j - 6);
  for (std::size_t a = 0; a < words_.size(); ++a) {
    if (a & stride) continue;
    const std::uint64_t m = o ? (words_[a] | words_[a + stride]) : (words_[a] & words_[a + stride]);
    words_[a] = words_[a + stride] = m;
  }
}

// --- analysis ---------------------------------------------------------------

Dyadic prob(const BooleanFunction& f, int o) {
  check_bit(o, "outcome");
  const std::uint64_t ones = f.count_ones();
  const std::uint64_t hits = o ? ones : f.size() - ones;
  return Dyadic::of(static_cast<std::int64_t>(hits), f.arity());
}

Dyadic influence(const BooleanFunction& f, int i) {
  check_coordinate(f, i);
  const int j = i - 1;
  auto words = f.words();
  std::uint64_t pivotal_pairs = 0;
  if (j < 6) {
    const unsigned s = 1U << j;
    const std::uint64_t neg = ~kVarMaskPos[j];
    for (auto x : words) pivotal_pairs += std::popcount((x ^ (x >> s)) & neg);
  } else {
    const std::size_t stride = std::size_t{1} << (j - 6);
    for (std::size_t a = 0; a < words.size(); ++a)
      if (!(a & stride)) pivotal_pairs += std::popcount(words[a] ^ words[a + stride]);
  }
  // Each pivotal pair accounts for two pivotal inputs out of 2^arity.
  return Dyadic::of(static_cast<std::int64_t>(pivotal_pairs), f.arity() - 1);
}

std::vector<Dyadic> influences(const BooleanFunction& f) {
  std::vector<Dyadic> out;
  out.reserve(f.arity());
  for (int i = 1; i <= f.arity(); ++i) out.push_back(influence(f, i));
  return out;
}

BooleanFunction restrict_fix(const BooleanFunction& f, int i, int b) {
  check_coordinate(f, i);
  check_bit(b, "fixed bit");
  const int j = i - 1;
  BooleanFunction g(f.arity() - 1);
  const std::uint64_t low_mask = (std::uint64_t{1} << j) - 1;
  for (std::uint64_t y = 0; y < g.size(); ++y) {
    const std::uint64_t z = (y & low_mask) | (static_cast<std::uint64_t>(b) << j) |
                            ((y & ~low_mask) << 1);
    g.set(y, f(z));
  }
  return g;
}

BooleanFunction absorb_all(const BooleanFunction& f, const CoordSet& s, int o) {
  s.check_within(f.arity());
  BooleanFunction g = f;
  for (int i : s) g.absorb(i, o);
  return g;
}

BooleanFunction project_out(const BooleanFunction& f, const CoordSet& s) {
  s.check_within(f.arity());
  std::vector<int> kept;
  for (int i = 1; i <= f.arity(); ++i)
    if (!s.contains(i)) kept.push_back(i - 1);
  BooleanFunction g(static_cast<int>(kept.size()));
  for (std::uint64_t y = 0; y < g.size(); ++y) g.set(y, f(scatter(y, kept)));
  return g;
}

BooleanFunction restrict_optimal(const BooleanFunction& f, const CoordSet& s, int o) {
  s.check_within(f.arity());
  if (static_cast<int>(s.size()) >= f.arity())
    throw InvalidArgument("restrict_optimal: adversary set covers every coordinate");
  return project_out(absorb_all(f, s, o), s);
}

bool can_bias(const BooleanFunction& f, const CoordSet& s, int o, double eps) {
  if (!(eps >= 0 && eps <= 1)) throw InvalidArgument("can_bias: eps outside [0, 1]");
  return prob(restrict_optimal(f, s, o), o).at_least(1.0 - eps);
}

InfluenceSumCheck influence_sum_check(const BooleanFunction& f, double gamma, double theta) {
  if (!(gamma > 0 && gamma < 0.5)) throw InvalidArgument("influence_sum_check: gamma outside (0, 1/2)");
  if (!(theta > 0 && theta < 0.125))
    throw InvalidArgument("influence_sum_check: theta outside (0, 1/8)");
  InfluenceSumCheck out;
  out.bound = gamma * std::log2(1.0 / theta) / 20.0;
  const double p = prob(f, 1).to_double();
  bool all_small = true;
  for (const auto& inf : influences(f)) {
    out.sum = out.sum + inf;
    if (inf.to_double() > theta) all_small = false;
  }
  out.applicable = gamma <= p && p <= 1 - gamma && all_small;
  out.holds = !out.applicable || out.sum.to_double() >= out.bound;
  return out;
}

// --- builtins ---------------------------------------------------------------

namespace builtin {

BooleanFunction parity(int n) {
  check_arity(n);
  return BooleanFunction::from_predicate(n, [](std::uint64_t z) { return std::popcount(z) & 1; });
}

BooleanFunction majority(int n) {
  check_arity(n);
  if (n % 2 == 0) throw InvalidArgument("majority needs an odd arity");
  return BooleanFunction::from_predicate(n, [n](std::uint64_t z) { return 2 * std::popcount(z) > n; });
}

BooleanFunction dictator(int n, int i) {
  check_arity(n);
  if (i < 1 || i > n) throw InvalidArgument("dictator coordinate outside [1, n]");
  return BooleanFunction::from_predicate(n, [i](std::uint64_t z) { return (z >> (i - 1)) & 1U; });
}

BooleanFunction or_fn(int n) {
  check_arity(n);
  return BooleanFunction::from_predicate(n, [](std::uint64_t z) { return z != 0; });
}

BooleanFunction and_fn(int n) {
  check_arity(n);
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  return BooleanFunction::from_predicate(n, [all](std::uint64_t z) { return z == all; });
}

BooleanFunction tribes(int count, int width) {
  if (count < 1 || width < 1) throw InvalidArgument("tribes needs positive count and width");
  check_arity(static_cast<long long>(count) * width);
  const std::uint64_t tribe = (std::uint64_t{1} << width) - 1;
  return BooleanFunction::from_predicate(count * width, [=](std::uint64_t z) {
    for (int t = 0; t < count; ++t)
      if (((z >> (t * width)) & tribe) == tribe) return true;
    return false;
  });
}

namespace {
bool recmaj_eval(std::uint64_t z, int depth, int offset) {
  if (depth == 0) return (z >> offset) & 1U;
  int span = 1;
  for (int d = 1; d < depth; ++d) span *= 3;
  int votes = 0;
  for (int c = 0; c < 3; ++c) votes += recmaj_eval(z, depth - 1, offset + c * span);
  return votes >= 2;
}
}  // namespace

BooleanFunction recursive_majority3(int depth) {
  if (depth < 0) throw InvalidArgument("recursive majority depth must be >= 0");
  long long n = 1;
  for (int d = 0; d < depth; ++d) n *= 3;
  check_arity(n);
  return BooleanFunction::from_predicate(static_cast<int>(n),
                                         [depth](std::uint64_t z) { return recmaj_eval(z, depth, 0); });
}

BooleanFunction random(int n, double p, std::uint64_t seed) {
  check_arity(n);
  if (!(p >= 0 && p <= 1)) throw InvalidArgument("random density outside [0, 1]");
  Rng rng(seed);
  BooleanFunction f(n);
  for (std::uint64_t z = 0; z < f.size(); ++z) f.set(z, rng.uniform() < p);
  return f;
}

}  // namespace builtin

BooleanFunction make_builtin(std::string_view name) {
  const auto parts = split(name, ':');
  const auto& kind = parts[0];
  auto arg = [&](std::size_t k) -> std::string_view {
    if (parts.size() <= k) throw InvalidArgument("missing parameter in '" + std::string(name) + "'");
    return parts[k];
  };
  auto int_arg = [&](std::size_t k) { return parse_number<int>(arg(k), name); };
  auto expect_parts = [&](std::size_t n) {
    if (parts.size() != n) throw InvalidArgument("wrong parameter count in '" + std::string(name) + "'");
  };
  if (kind == "parity") {
    expect_parts(2);
    return builtin::parity(int_arg(1));
  }
  if (kind == "majority") {
    expect_parts(2);
    return builtin::majority(int_arg(1));
  }
  if (kind == "dictator") {
    expect_parts(3);
    return builtin::dictator(int_arg(1), int_arg(2));
  }
  if (kind == "or") {
    expect_parts(2);
    return builtin::or_fn(int_arg(1));
  }
  if (kind == "and") {
    expect_parts(2);
    return builtin::and_fn(int_arg(1));
  }
  if (kind == "recmaj3") {
    expect_parts(2);
    return builtin::recursive_majority3(int_arg(1));
  }
  if (kind == "const0" || kind == "const1") {
    expect_parts(2);
    const int n = int_arg(1);
    check_arity(n);
    return BooleanFunction::constant(n, kind == "const1");
  }
  if (kind == "tribes") {
    expect_parts(2);
    const auto dims = split(arg(1), 'x');
    if (dims.size() != 2) throw InvalidArgument("tribes expects <count>x<width>: '" + std::string(name) + "'");
    return builtin::tribes(parse_number<int>(dims[0], name), parse_number<int>(dims[1], name));
  }
  if (kind == "random") {
    expect_parts(4);
    return builtin::random(int_arg(1), parse_double(arg(2), name),
                           parse_number<std::uint64_t>(arg(3), name));
  }
  throw InvalidArgument("unknown function '" + std::string(name) + "'");
}

// --- text format ------------------------------------------------------------

std::string serialize(const BooleanFunction& f) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "boolfn v1 arity=" + std::to_string(f.arity()) + "\n";
  const std::uint64_t nibbles = std::max<std::uint64_t>(1, f.size() / 4);
  out.reserve(out.size() + nibbles + 1);
  auto words = f.words();
  for (std::uint64_t k = 0; k < nibbles; ++k) {
    const std::uint64_t bit = 4 * k;
    out += kHex[(words[bit >> 6] >> (bit & 63)) & 0xF];
  }
  out += "\n";
  return out;
}

BooleanFunction deserialize(std::string_view text) {
  constexpr std::string_view kHeader = "boolfn v1 arity=";
  if (text.substr(0, kHeader.size()) != kHeader) throw InvalidArgument("missing 'boolfn v1' header");
  text.remove_prefix(kHeader.size());
  const auto eol = text.find('\n');
  if (eol == std::string_view::npos) throw InvalidArgument("truncated boolfn header");
  const int arity = parse_number<int>(text.substr(0, eol), "boolfn header");
  if (arity < 0 || arity > kMaxArity) throw CapacityError("boolfn arity exceeds MAX_ARITY");
  BooleanFunction f(arity);
  const std::uint64_t nibbles = std::max<std::uint64_t>(1, f.size() / 4);
  std::uint64_t k = 0;
  for (char c : text.substr(eol + 1)) {
    if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
    int v;
    if (c >= '0' && c <= '9')
      v = c - '0';
    else if (c >= 'a' && c <= 'f')
      v = c - 'a' + 10;
    else
      throw InvalidArgument(std::string("invalid hex digit '") + c + "'");
    if (k >= nibbles) throw InvalidArgument("too many hex digits for arity");
    for (int b = 0; b < 4; ++b) {
      const std::uint64_t z = 4 * k + b;
      if ((v >> b) & 1) {
        if (z >= f.size()) throw InvalidArgument("bits set beyond the truth table");
        f.set(z, true);
      }
    }
    ++k;
  }
  if (k != nibbles) throw InvalidArgument("expected " + std::to_string(nibbles) + " hex digits, got " + std::to_string(k));
  return f;
}

}  // namespace coinflip
