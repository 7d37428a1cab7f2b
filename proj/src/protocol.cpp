#include "coinflip/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

#include "coinflip/error.hpp"
#include "coinflip/parallel.hpp"

namespace coinflip {

// --- Transcript -------------------------------------------------------------

Transcript::Transcript(std::size_t players, std::vector<int> bits_per_round)
    : players_(players), bits_(std::move(bits_per_round)) {
  words_.reserve(bits_.size());
  for (int r : bits_) words_.emplace_back((players_ * r + 63) / 64, 0);
}

std::size_t Transcript::total_bits() const {
  std::size_t n = 0;
  for (int r : bits_) n += players_ * r;
  return n;
}

void Transcript::set_bit(int round, std::size_t pos, bool v) {
  auto& w = words_[round - 1][pos >> 6];
  const std::uint64_t m = std::uint64_t{1} << (pos & 63);
  w = v ? (w | m) : (w & ~m);
}

std::uint64_t Transcript::message(int round, std::size_t player) const {
  const int r = bits(round);
  const std::size_t base = (player - 1) * r;
  std::uint64_t v = 0;
  for (int b = 0; b < r; ++b) v |= static_cast<std::uint64_t>(bit(round, base + b)) << b;
  return v;
}

void Transcript::set_message(int round, std::size_t player, std::uint64_t value) {
  const int r = bits(round);
  const std::size_t base = (player - 1) * r;
  for (int b = 0; b < r; ++b) set_bit(round, base + b, (value >> b) & 1U);
}

void Transcript::fill_random(int round, Rng& rng) {
  auto& w = words_[round - 1];
  for (auto& x : w) x = rng.next();
  const std::size_t used = round_size(round) & 63;
  if (used) w.back() &= (std::uint64_t{1} << used) - 1;
}

void Transcript::clear_round(int round) {
  auto& w = words_[round - 1];
  std::fill(w.begin(), w.end(), 0);
}

std::uint64_t Transcript::index(int rounds_used) const {
  std::uint64_t idx = 0;
  std::size_t shift = 0;
  for (int i = 1; i <= rounds_used; ++i) {
    const std::size_t n = round_size(i);
    if (shift + n > 64) throw CapacityError("transcript prefix wider than 64 bits");
    // A round of <= 64 bits lives in a single word.
    if (n > 0) idx |= words_[i - 1][0] << shift;
    shift += n;
  }
  return idx;
}

void Transcript::set_from_index(int rounds_used, std::uint64_t index) {
  std::size_t shift = 0;
  for (int i = 1; i <= rounds_used; ++i) {
    const std::size_t n = round_size(i);
    if (shift + n > 64) throw CapacityError("transcript prefix wider than 64 bits");
    const std::uint64_t mask = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    words_[i - 1][0] = (index >> shift) & mask;
    shift += n;
  }
}

Transcript Transcript::truncated(int rounds_used) const {
  Transcript t;
  t.players_ = players_;
  t.bits_.assign(bits_.begin(), bits_.begin() + rounds_used);
  t.words_.assign(words_.begin(), words_.begin() + rounds_used);
  return t;
}

// --- ProtocolSpec / BitCoalition -------------------------------------------

std::size_t ProtocolSpec::total_bits() const {
  std::size_t n = 0;
  for (int r : bits) n += players * r;
  return n;
}

void ProtocolSpec::validate() const {
  if (players < 1) throw InvalidArgument(name + ": needs at least one player");
  if (bits.empty()) throw InvalidArgument(name + ": needs at least one round");
  for (int r : bits)
    if (r < 1 || r > 63) throw InvalidArgument(name + ": bits per round must be in [1, 63]");
  if (!evaluate) throw InvalidArgument(name + ": missing evaluator");
}

BitCoalition BitCoalition::none(const ProtocolSpec& p) {
  BitCoalition c;
  c.positions.resize(p.rounds());
  return c;
}

BitCoalition BitCoalition::of_players(const ProtocolSpec& p, const CoordSet& players) {
  players.check_within(static_cast<int>(p.players));
  BitCoalition c = none(p);
  for (int i = 1; i <= p.rounds(); ++i) {
    const int r = p.bits[i - 1];
    for (int q : players)
      for (int b = 0; b < r; ++b) c.positions[i - 1].push_back(static_cast<std::size_t>(q - 1) * r + b);
  }
  return c;
}

CoordSet BitCoalition::owners(const ProtocolSpec& p) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (auto pos : positions[i]) out.push_back(static_cast<int>(pos / p.bits[i]) + 1);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return CoordSet(std::move(out));
}

std::size_t BitCoalition::bit_count() const {
  std::size_t n = 0;
  for (const auto& r : positions) n += r.size();
  return n;
}

void BitCoalition::add(int round, std::size_t pos) {
  auto& v = positions.at(round - 1);
  auto it = std::lower_bound(v.begin(), v.end(), pos);
  if (it == v.end() || *it != pos) v.insert(it, pos);
}

void BitCoalition::merge(const BitCoalition& other) {
  if (positions.size() < other.positions.size()) positions.resize(other.positions.size());
  for (std::size_t i = 0; i < other.positions.size(); ++i)
    for (auto pos : other.positions[i]) add(static_cast<int>(i) + 1, pos);
}

// --- runs -------------------------------------------------------------------

Outcome honest_run(const ProtocolSpec& p, Rng& rng) {
  Transcript t = p.blank_transcript();
  for (int i = 1; i <= p.rounds(); ++i) t.fill_random(i, rng);
  return p.evaluate(t);
}

Outcome run_with_adversary(const ProtocolSpec& p, const AdversaryStrategy& adv, Rng& rng) {
  adv.coalition.check_within(static_cast<int>(p.players));
  Transcript t = p.blank_transcript();
  for (int i = 1; i <= p.rounds(); ++i) {
    t.fill_random(i, rng);
    if (adv.coalition.empty()) continue;
    for (int q : adv.coalition) t.set_message(i, q, 0);
    const auto msgs = adv.respond(i, t);
    if (msgs.size() != adv.coalition.size())
      throw InvalidArgument("strategy shape mismatch: expected " + std::to_string(adv.coalition.size()) +
                            " messages, got " + std::to_string(msgs.size()));
    std::size_t k = 0;
    for (int q : adv.coalition) t.set_message(i, q, msgs[k++]);
  }
  return p.evaluate(t);
}

AdversaryStrategy honest_strategy() {
  return {CoordSet{}, [](int, const Transcript&) { return std::vector<std::uint64_t>{}; }};
}

AdversaryStrategy constant_strategy(const CoordSet& coalition, std::uint64_t message) {
  const std::size_t n = coalition.size();
  return {coalition, [n, message](int, const Transcript&) { return std::vector<std::uint64_t>(n, message); }};
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return Rng::derive(h, v); }

std::uint64_t transcript_hash(const Transcript& t, int through_round) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (int i = 1; i <= through_round; ++i)
    for (std::size_t pos = 0; pos < t.round_size(i); pos += 64) {
      std::uint64_t w = 0;
      for (std::size_t b = pos; b < std::min(pos + 64, t.round_size(i)); ++b)
        w |= static_cast<std::uint64_t>(t.bit(i, b)) << (b - pos);
      h = mix(h, w);
    }
  return h;
}

}  // namespace

AdversaryStrategy last_round_best_response(const ProtocolSpec& p, const CoordSet& coalition,
                                           OutcomePredicate target) {
  coalition.check_within(static_cast<int>(p.players));
  const int k = p.rounds();
  const std::size_t free_bits = coalition.size() * static_cast<std::size_t>(p.bits[k - 1]);
  if (free_bits > 20)
    throw CapacityError("last_round_best_response: " + std::to_string(free_bits) +
                        " coalition bits in the last round (limit 20)");
  return {coalition, [p, coalition, target, k](int round, const Transcript& seen) {
            std::vector<std::uint64_t> out(coalition.size(), 0);
            const int r = p.bits[round - 1];
            const std::uint64_t mask = (std::uint64_t{1} << r) - 1;
            if (round < k) {
              std::uint64_t h = transcript_hash(seen, round);
              for (std::size_t m = 0; m < out.size(); ++m) out[m] = mix(h, m) & mask;
              return out;
            }
            Transcript t = seen;
            const std::uint64_t patterns = std::uint64_t{1} << (coalition.size() * r);
            for (std::uint64_t pat = 0; pat < patterns; ++pat) {
              std::size_t m = 0;
              for (int q : coalition) t.set_message(round, q, (pat >> (m++ * r)) & mask);
              if (target(p.evaluate(t))) {
                for (std::size_t j = 0; j < out.size(); ++j) out[j] = (pat >> (j * r)) & mask;
                return out;
              }
            }
            return out;
          }};
}

MonteCarloEstimate monte_carlo_value(const ProtocolSpec& p, const AdversaryStrategy& adv,
                                     const OutcomePredicate& target, std::uint64_t trials,
                                     std::uint64_t seed, double confidence) {
  if (trials < 1) throw InvalidArgument("monte_carlo_value: trials must be >= 1");
  std::atomic<std::uint64_t> hits{0};
  parallel_chunks(trials, [&](std::size_t begin, std::size_t end) {
    std::uint64_t local = 0;
    for (std::size_t trial = begin; trial < end; ++trial) {
      Rng rng(Rng::derive(seed, trial));
      if (target(run_with_adversary(p, adv, rng))) ++local;
    }
    hits += local;
  });
  MonteCarloEstimate out;
  out.trials = trials;
  out.hits = hits.load();
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.ci_halfwidth = stats::hoeffding_halfwidth(trials, confidence);
  return out;
}

MonteCarloEstimate monte_carlo_value(const ProtocolSpec& p, const AdversaryStrategy& adv, Outcome o,
                                     std::uint64_t trials, std::uint64_t seed, double confidence) {
  return monte_carlo_value(
      p, adv, [o](Outcome x) { return x == o; }, trials, seed, confidence);
}

// --- exact evaluation -------------------------------------------------------

namespace {

void check_budget(const ProtocolSpec& p, int budget) {
  p.validate();
  if (p.total_bits() > static_cast<std::size_t>(budget))
    throw CapacityError(p.name + ": exact evaluation needs " + std::to_string(p.total_bits()) +
                        " transcript bits, over the exact budget of " + std::to_string(budget));
}

// Backward induction over the transcript tree. Counts are numerators over
// 2^(good bits of the remaining rounds).
class ExactGame {
 public:
  ExactGame(const ProtocolSpec& p, const BitCoalition& bad, OutcomePredicate target)
      : p_(p), target_(std::move(target)), t_(p.blank_transcript()) {
    const int k = p.rounds();
    if (static_cast<int>(bad.positions.size()) != k)
      throw InvalidArgument("bit coalition has the wrong number of rounds");
    good_.resize(k);
    bad_.resize(k);
    good_after_.assign(k + 2, 0);
    for (int i = 1; i <= k; ++i) {
      std::vector<bool> is_bad(t_.round_size(i), false);
      for (auto pos : bad.positions[i - 1]) {
        if (pos >= is_bad.size()) throw InvalidArgument("bit coalition position out of range");
        is_bad[pos] = true;
      }
      for (std::size_t pos = 0; pos < is_bad.size(); ++pos) (is_bad[pos] ? bad_ : good_)[i - 1].push_back(pos);
    }
    for (int i = k; i >= 1; --i) good_after_[i] = good_after_[i + 1] + static_cast<int>(good_[i - 1].size());
  }

  int good_bits() const { return good_after_[1]; }
  Transcript& transcript() { return t_; }

  std::uint64_t solve(int round) {
    if (round > p_.rounds()) return target_(p_.evaluate(t_)) ? 1 : 0;
    const std::uint64_t good_patterns = std::uint64_t{1} << good_[round - 1].size();
    std::uint64_t sum = 0;
    for (std::uint64_t g = 0; g < good_patterns; ++g) {
      place(good_[round - 1], round, g);
      sum += best_child(round).second;
    }
    return sum;
  }

  // (pattern, count) of the lowest bad pattern maximizing the subtree value,
  // with the good bits of `round` already placed.
  std::pair<std::uint64_t, std::uint64_t> best_child(int round) {
    const std::uint64_t full = std::uint64_t{1} << good_after_[round + 1];
    const std::uint64_t bad_patterns = std::uint64_t{1} << bad_[round - 1].size();
    std::uint64_t best = 0, best_pattern = 0;
    bool first = true;
    for (std::uint64_t b = 0; b < bad_patterns; ++b) {
      place(bad_[round - 1], round, b);
      const std::uint64_t v = solve(round + 1);
      if (first || v > best) {
        best = v;
        best_pattern = b;
        first = false;
        if (best == full) break;
      }
    }
    return {best_pattern, best};
  }

  void place_bad(int round, std::uint64_t pattern) { place(bad_[round - 1], round, pattern); }
  void place_good(int round, std::uint64_t pattern) { place(good_[round - 1], round, pattern); }
  std::size_t good_count(int round) const { return good_[round - 1].size(); }

 private:
  void place(const std::vector<std::size_t>& positions, int round, std::uint64_t pattern) {
    for (std::size_t k = 0; k < positions.size(); ++k) t_.set_bit(round, positions[k], (pattern >> k) & 1U);
  }

  const ProtocolSpec& p_;
  OutcomePredicate target_;
  Transcript t_;
  std::vector<std::vector<std::size_t>> good_, bad_;
  std::vector<int> good_after_;
};

void play(ExactGame& game, int round, int rounds, std::vector<std::uint8_t>& reached) {
  if (round > rounds) {
    reached[game.transcript().index(rounds)] = 1;
    return;
  }
  const std::uint64_t good_patterns = std::uint64_t{1} << game.good_count(round);
  for (std::uint64_t g = 0; g < good_patterns; ++g) {
    game.place_good(round, g);
    const auto [pattern, value] = game.best_child(round);
    game.place_bad(round, pattern);
    play(game, round + 1, rounds, reached);
  }
}

OutcomePredicate equals(Outcome o) {
  return [o](Outcome x) { return x == o; };
}

}  // namespace

Dyadic exact_value(const ProtocolSpec& p, const BitCoalition& bad, const OutcomePredicate& target, int budget) {
  check_budget(p, budget);
  ExactGame game(p, bad, target);
  const std::uint64_t count = game.solve(1);
  return Dyadic::of(static_cast<std::int64_t>(count), game.good_bits());
}

Dyadic exact_adversary_value(const ProtocolSpec& p, const CoordSet& coalition, Outcome o, int budget) {
  check_budget(p, budget);
  return exact_value(p, BitCoalition::of_players(p, coalition), equals(o), budget);
}

Dyadic exact_bad_leader_value(const ProtocolSpec& p, const CoordSet& coalition, int budget) {
  if (p.domain != Domain::leader) throw InvalidArgument(p.name + ": not a leader election protocol");
  check_budget(p, budget);
  return exact_value(
      p, BitCoalition::of_players(p, coalition), [coalition](Outcome x) { return coalition.contains(static_cast<int>(x)); },
      budget);
}

OptimalPlay optimal_play(const ProtocolSpec& p, const BitCoalition& bad, const OutcomePredicate& target, int budget) {
  check_budget(p, budget);
  ExactGame game(p, bad, target);
  OptimalPlay out;
  out.good_bits = game.good_bits();
  out.value = Dyadic::of(static_cast<std::int64_t>(game.solve(1)), game.good_bits());
  out.reached.assign(std::size_t{1} << p.total_bits(), 0);
  play(game, 1, p.rounds(), out.reached);
  return out;
}

AdversaryStrategy optimal_strategy(const ProtocolSpec& p, const CoordSet& coalition, OutcomePredicate target,
                                   int budget) {
  check_budget(p, budget);
  coalition.check_within(static_cast<int>(p.players));
  const BitCoalition bad = BitCoalition::of_players(p, coalition);
  return {coalition, [p, bad, coalition, target](int round, const Transcript& seen) {
            ExactGame game(p, bad, target);
            Transcript& t = game.transcript();
            for (int i = 1; i <= round; ++i)
              for (std::size_t pos = 0; pos < seen.round_size(i); ++pos) t.set_bit(i, pos, seen.bit(i, pos));
            const std::uint64_t pattern = game.best_child(round).first;
            game.place_bad(round, pattern);
            std::vector<std::uint64_t> out;
            for (int q : coalition) out.push_back(t.message(round, q));
            return out;
          }};
}

// --- induced functions ------------------------------------------------------

namespace {

BooleanFunction last_round_table(const ProtocolSpec& p, Transcript t) {
  const int k = p.rounds();
  const std::size_t n = t.round_size(k);
  if (n > static_cast<std::size_t>(kMaxArity))
    throw CapacityError(p.name + ": last round has " + std::to_string(n) + " bits, over MAX_ARITY");
  BooleanFunction f(static_cast<int>(n));
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    for (std::size_t pos = 0; pos < n; ++pos) t.set_bit(k, pos, (x >> pos) & 1U);
    const Outcome o = p.evaluate(t);
    if (o > 1) throw InvalidArgument(p.name + ": coin evaluator returned " + std::to_string(o));
    f.set(x, o == 1);
  }
  return f;
}

}  // namespace

BooleanFunction protocol_table(const ProtocolSpec& p) {
  p.validate();
  if (p.rounds() != 1) throw InvalidArgument(p.name + ": protocol_table needs a 1-round protocol");
  if (p.domain != Domain::coin) throw InvalidArgument(p.name + ": protocol_table needs a coin protocol");
  return last_round_table(p, p.blank_transcript());
}

BooleanFunction induced_round_function(const ProtocolSpec& p, const Transcript& prefix) {
  p.validate();
  if (p.rounds() < 2) throw InvalidArgument(p.name + ": induced_round_function needs k >= 2");
  if (p.domain != Domain::coin) throw InvalidArgument(p.name + ": induced_round_function needs a coin protocol");
  Transcript t = p.blank_transcript();
  for (int i = 1; i < p.rounds(); ++i)
    for (std::size_t pos = 0; pos < t.round_size(i); ++pos) t.set_bit(i, pos, prefix.bit(i, pos));
  return last_round_table(p, std::move(t));
}

ProtocolSpec leader_to_coinflip(const ProtocolSpec& p) {
  p.validate();
  if (p.domain != Domain::leader) throw InvalidArgument(p.name + ": leader_to_coinflip needs a leader protocol");
  ProtocolSpec q;
  q.name = p.name + "+coin";
  q.players = p.players;
  q.bits = p.bits;
  q.bits.push_back(p.bits.back());
  q.domain = Domain::coin;
  const int k = p.rounds();
  const int r = q.bits.back();
  q.evaluate = [inner = p.evaluate, k, r, players = p.players](const Transcript& t) -> Outcome {
    const Outcome leader = inner(t.truncated(k));
    if (leader < 1 || leader > players)
      throw InvalidArgument("leader evaluator returned " + std::to_string(leader));
    return t.bit(k + 1, static_cast<std::size_t>(leader - 1) * r) ? 1 : 0;
  };
  return q;
}

// --- resilience -------------------------------------------------------------

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(c);
}

// Calls fn(coalition) for every size-b subset of [n] in lexicographic order.
template <class Fn>
void for_each_subset(int n, int b, Fn&& fn) {
  std::vector<int> idx(b);
  std::iota(idx.begin(), idx.end(), 1);
  for (;;) {
    fn(CoordSet(idx));
    int k = b - 1;
    while (k >= 0 && idx[k] == n - b + k + 1) --k;
    if (k < 0) return;
    ++idx[k];
    for (int j = k + 1; j < b; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

ResilienceReport resilience_check(const ProtocolSpec& p, int b, double gamma, const ResilienceOptions& options) {
  p.validate();
  const int n = static_cast<int>(p.players);
  if (b < 0 || b > n) throw InvalidArgument("resilience_check: coalition budget outside [0, players]");
  if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("resilience_check: gamma outside (0, 1)");
  const std::uint64_t count = binomial(n, b);
  if (count > options.max_coalitions)
    throw CapacityError("resilience_check: C(" + std::to_string(n) + "," + std::to_string(b) + ") = " +
                        std::to_string(count) + " coalitions exceeds the limit of " +
                        std::to_string(options.max_coalitions));
  if (options.mode == EvalMode::exact) check_budget(p, options.budget);

  ResilienceReport report;
  report.mode = options.mode;
  bool have = false;
  auto consider = [&](const CoordSet& coalition, Outcome o, double value, std::optional<Dyadic> exact, double ci) {
    if (!have || value > report.value) {
      have = true;
      report.value = value;
      report.exact_value = exact;
      report.worst_coalition = coalition;
      report.worst_outcome = o;
      report.ci_halfwidth = ci;
    }
  };
  std::uint64_t coalition_index = 0;
  for_each_subset(n, b, [&](const CoordSet& coalition) {
    ++report.coalitions_checked;
    const std::uint64_t seed = Rng::derive(options.seed, coalition_index++);
    if (p.domain == Domain::coin) {
      for (Outcome o = 0; o <= 1; ++o) {
        if (options.mode == EvalMode::exact) {
          const Dyadic v = exact_adversary_value(p, coalition, o, options.budget);
          consider(coalition, o, v.to_double(), v, 0);
        } else {
          const auto mc = monte_carlo_value(p, last_round_best_response(p, coalition, equals(o)), o,
                                            options.trials, Rng::derive(seed, o));
          consider(coalition, o, mc.estimate, std::nullopt, mc.ci_halfwidth);
        }
      }
    } else {
      auto in_coalition = [coalition](Outcome x) { return coalition.contains(static_cast<int>(x)); };
      if (options.mode == EvalMode::exact) {
        const Dyadic v = exact_bad_leader_value(p, coalition, options.budget);
        consider(coalition, 0, v.to_double(), v, 0);
      } else {
        const auto mc = monte_carlo_value(p, last_round_best_response(p, coalition, in_coalition), in_coalition,
                                          options.trials, seed);
        consider(coalition, 0, mc.estimate, std::nullopt, mc.ci_halfwidth);
      }
    }
  });
  report.resilient = report.value <= 1 - gamma;
  return report;
}

}  // namespace coinflip
