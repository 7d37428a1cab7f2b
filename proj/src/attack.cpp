#include "coinflip/attack.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "coinflip/error.hpp"
#include "coinflip/parallel.hpp"
#include "coinflip/report.hpp"
#include "coinflip/stats.hpp"

namespace coinflip {

int process_step_budget(int coords, double gamma, double delta, int h) {
  if (h <= 2) return coords;
  const double r = std::ceil(100.0 * coords * std::log2(1 / delta) / (gamma * std::log2(h / 2.0)));
  return r >= coords ? coords : static_cast<int>(r);
}

ResolvedParams resolve_params(const AttackParams& params, int coords, int k, double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("gamma must be in (0, 1)");
  if (!(params.delta > 0 && params.delta < 1)) throw InvalidArgument("delta must be in (0, 1)");
  if (coords < 1) throw InvalidArgument("no coordinates to attack");
  ResolvedParams rp;
  rp.gamma = gamma;
  rp.delta = params.delta;
  if (params.mode == ParamMode::desk) {
    if (params.h < 1) throw InvalidArgument("h must be >= 1");
    if (params.c < 1) throw InvalidArgument("c must be >= 1");
    if (params.r < 0) throw InvalidArgument("r must be >= 0");
    rp.h = params.h;
    rp.c = params.c;
    rp.r = params.r > 0 ? std::min(params.r, coords) : process_step_budget(coords, gamma, params.delta, rp.h);
  } else {
    const double l = stats::iterated_log2(coords, k - 1);
    const double h = std::floor(std::pow(l, 1e-4));
    const double c = std::floor(coords / std::pow(l, 1e4));
    const bool ok = h >= 8 && h <= coords && h * std::log2(h / 2) < 40.0 * coords / gamma && c >= 1;
    if (!ok)
      throw InvalidArgument("paper-mode parameters are degenerate at " + std::to_string(coords) +
                            " coordinates (h = " + std::to_string(static_cast<long long>(h)) +
                            ", c = " + std::to_string(static_cast<long long>(c)) +
                            "; need 8 <= h <= l, h log2(h/2) < 40 l / gamma, c >= 1); use desk mode");
    rp.h = static_cast<int>(h);
    rp.c = static_cast<int>(c);
    rp.r = process_step_budget(coords, gamma, params.delta, rp.h);
  }
  rp.heavy_num = rp.h >= 2 ? 2 : 1;
  rp.heavy_den = rp.h >= 2 ? rp.h : 1;
  return rp;
}

const char* to_string(StepCase c) {
  switch (c) {
    case StepCase::heavy: return "heavy";
    case StepCase::random: return "random";
    case StepCase::greedy: return "greedy";
  }
  return "?";
}

// --- greedy -----------------------------------------------------------------

GreedyResult greedy_extend(const BooleanFunction& f, int o, double target, const CoordSet& initial) {
  initial.check_within(f.arity());
  BooleanFunction cur = absorb_all(f, initial, o);
  std::vector<int> owned(initial.begin(), initial.end());
  GreedyResult out;
  out.trace.initial_prob = prob(cur, o);
  Dyadic p = out.trace.initial_prob;
  Dyadic z;
  while (!p.at_least(target)) {
    const auto infl = influences(cur);
    int best = 0;
    for (int i = 1; i <= f.arity(); ++i)
      if (infl[i - 1] > Dyadic::zero() && (best == 0 || infl[i - 1] > infl[best - 1])) best = i;
    if (best == 0) throw NotEnoughMass("greedy: no influential coordinate left below the target");
    cur.absorb(best, o);
    owned.push_back(best);
    z = z + infl[best - 1];
    p = prob(cur, o);
    out.trace.steps.push_back({best, StepCase::greedy, infl[best - 1], z, p});
  }
  out.b = CoordSet(std::move(owned));
  out.final_prob = p;
  return out;
}

GreedyResult kkl_greedy(const BooleanFunction& f, int o, double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("gamma must be in (0, 1)");
  if (o != 0 && o != 1) throw InvalidArgument("outcome must be 0 or 1");
  const Dyadic start = prob(f, o);
  if (!start.at_least(gamma))
    throw NotEnoughMass("Pr[f = " + std::to_string(o) + "] = " + start.str() + " is below gamma");
  return greedy_extend(f, o, 1 - gamma, {});
}

// --- semi-random process ----------------------------------------------------

namespace {

template <class PickRandom>
ProcessResult run_process(const BooleanFunction& f, int o, const ResolvedParams& rp, PickRandom&& pick) {
  const int n = f.arity();
  BooleanFunction cur = f;
  std::vector<bool> used(n + 1, false);
  std::vector<int> b_r, b_h;
  ProcessResult out;
  out.trace.initial_prob = prob(cur, o);
  Dyadic p = out.trace.initial_prob;
  Dyadic z;
  const double goal = 1 - rp.gamma;
  for (int step = 0; step < rp.r && !p.at_least(goal); ++step) {
    const auto infl = influences(cur);
    int coord = 0;
    for (int i = 1; i <= n; ++i) {
      if (used[i] || !infl[i - 1].at_least(rp.heavy_num, rp.heavy_den)) continue;
      if (coord == 0 || infl[i - 1] > infl[coord - 1]) coord = i;
    }
    StepCase tag = StepCase::heavy;
    if (coord == 0) {
      tag = StepCase::random;
      coord = pick(used);
      if (coord == 0) break;
    }
    used[coord] = true;
    (tag == StepCase::heavy ? b_h : b_r).push_back(coord);
    cur.absorb(coord, o);
    z = z + infl[coord - 1];
    p = prob(cur, o);
    out.trace.steps.push_back({coord, tag, infl[coord - 1], z, p});
  }
  out.b_r = CoordSet(std::move(b_r));
  out.b_h = CoordSet(std::move(b_h));
  out.final_prob = p;
  out.success = p.at_least(goal);
  if (static_cast<int>(out.b_h.size()) > rp.h)
    throw AssertionFailure("process: |B_H| = " + std::to_string(out.b_h.size()) + " exceeds h = " +
                               std::to_string(rp.h),
                           to_json(out).dump());
  return out;
}

void require_mass(const BooleanFunction& f, int o, double gamma, const std::string& who) {
  if (o != 0 && o != 1) throw InvalidArgument("outcome must be 0 or 1");
  const Dyadic start = prob(f, o);
  if (!start.at_least(gamma))
    throw NotEnoughMass(who + ": Pr[f = " + std::to_string(o) + "] = " + start.str() + " is below gamma");
}

// Adversary owning s: can it force o with probability >= 1 - gamma?
bool verify_bias(const BooleanFunction& f, const CoordSet& s, int o, double gamma) {
  if (static_cast<int>(s.size()) == f.arity()) return prob(f, o) > Dyadic::zero();
  return can_bias(f, s, o, gamma);
}

}  // namespace

ProcessResult semi_random_process(const BooleanFunction& f, int o, const AttackParams& params, Rng& rng) {
  const ResolvedParams rp = resolve_params(params, f.arity(), 1, params.gamma);
  require_mass(f, o, params.gamma, "semi_random_process");
  return run_process(f, o, rp, [&](const std::vector<bool>& used) {
    std::vector<int> free;
    for (std::size_t i = 1; i < used.size(); ++i)
      if (!used[i]) free.push_back(static_cast<int>(i));
    if (free.empty()) return 0;
    return free[rng.below(free.size())];
  });
}

ProcessResult ordered_process(const BooleanFunction& f, int o, const ResolvedParams& rp,
                              const std::vector<int>& order) {
  return run_process(f, o, rp, [&](const std::vector<bool>& used) {
    for (int i : order)
      if (!used[i]) return i;
    return 0;
  });
}

// --- family common set ------------------------------------------------------

FamilyResult family_common_set(const std::vector<FamilyMember>& family, const ResolvedParams& rp, int candidates,
                               std::uint64_t seed) {
  if (family.empty()) throw InvalidArgument("family_common_set: empty family");
  if (candidates < 1) throw InvalidArgument("family_common_set: need at least one candidate");
  const int n = family.front().f.arity();
  for (std::size_t m = 0; m < family.size(); ++m) {
    if (family[m].f.arity() != n) throw InvalidArgument("family_common_set: members differ in arity");
    require_mass(family[m].f, family[m].o, rp.gamma, "family member " + std::to_string(m));
  }
  const int r = std::min(rp.r, n);

  struct Candidate {
    std::vector<int> order;
    std::vector<std::optional<CoordSet>> b_h;
    CoordSet b_r;
    std::size_t covered = 0;
  };
  std::vector<Candidate> cands(candidates);
  parallel_chunks(cands.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Candidate& c = cands[i];
      Rng rng(Rng::derive(seed, i));
      std::vector<int> perm(n);
      for (int j = 0; j < n; ++j) perm[j] = j + 1;
      for (int j = 0; j < r; ++j) std::swap(perm[j], perm[j + rng.below(n - j)]);
      c.order.assign(perm.begin(), perm.begin() + r);
      std::vector<int> used_r;
      c.b_h.resize(family.size());
      for (std::size_t m = 0; m < family.size(); ++m) {
        const ProcessResult res = ordered_process(family[m].f, family[m].o, rp, c.order);
        if (!res.success) continue;
        ++c.covered;
        c.b_h[m] = res.b_h;
        used_r.insert(used_r.end(), res.b_r.begin(), res.b_r.end());
      }
      std::sort(used_r.begin(), used_r.end());
      used_r.erase(std::unique(used_r.begin(), used_r.end()), used_r.end());
      c.b_r = CoordSet(std::move(used_r));
    }
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const auto& a = cands[i];
    const auto& b = cands[best];
    if (a.covered > b.covered || (a.covered == b.covered && a.b_r.size() < b.b_r.size())) best = i;
  }
  FamilyResult out;
  out.candidate = static_cast<int>(best);
  out.r = r;
  out.order = std::move(cands[best].order);
  out.b_h = std::move(cands[best].b_h);
  out.b_r = std::move(cands[best].b_r);
  out.covered = cands[best].covered;
  out.coverage = static_cast<double>(out.covered) / static_cast<double>(family.size());
  out.verified = true;
  for (std::size_t m = 0; m < family.size(); ++m)
    if (out.b_h[m] && !verify_bias(family[m].f, out.b_r.united(*out.b_h[m]), family[m].o, rp.gamma))
      out.verified = false;
  return out;
}

FamilyResult family_common_set(const std::vector<FamilyMember>& family, const AttackParams& params) {
  if (family.empty()) throw InvalidArgument("family_common_set: empty family");
  const ResolvedParams rp = resolve_params(params, family.front().f.arity(), 1, params.gamma);
  return family_common_set(family, rp, params.candidates, params.seed);
}

// --- k-round protocols -------------------------------------------------------

namespace {

bool is_one(Outcome o) { return o == 1; }

struct Context {
  const AttackParams& params;
  Rng rng;
};

BitCoalition empty_coalition(int rounds) {
  BitCoalition b;
  b.positions.resize(rounds);
  return b;
}

Dyadic value_of(const ProtocolSpec& p, const BitCoalition& b, const Context& ctx) {
  return exact_value(p, b, is_one, ctx.params.budget);
}

[[noreturn]] void fail(const std::string& what, const LevelTrace& level) {
  throw AssertionFailure(what, to_json(level).dump());
}

// A (k-1)-round protocol outputting 1 iff the prefix is still alive.
ProtocolSpec alive_protocol(const ProtocolSpec& p, std::shared_ptr<const std::vector<std::uint8_t>> alive) {
  ProtocolSpec q;
  q.name = p.name + "/prefix";
  q.players = p.players;
  q.bits.assign(p.bits.begin(), p.bits.end() - 1);
  q.domain = Domain::coin;
  const int rounds = q.rounds();
  q.evaluate = [alive = std::move(alive), rounds](const Transcript& t) -> Outcome {
    return (*alive)[t.index(rounds)];
  };
  return q;
}

BitCoalition bias_level(const ProtocolSpec& p, double gamma, Context& ctx, LevelTrace& level);

// Adds prefix-round bits to b_i until the alive protocol reaches `target`.
void boost(const ProtocolSpec& temp, double target, BitCoalition& b_i, Context& ctx, LevelTrace& level) {
  if (value_of(temp, b_i, ctx).at_least(target)) return;
  if (temp.rounds() == 1) {
    std::vector<int> owned;
    for (auto pos : b_i.positions[0]) owned.push_back(static_cast<int>(pos) + 1);
    const GreedyResult g = greedy_extend(protocol_table(temp), 1, target, CoordSet(owned));
    for (int coord : g.b) b_i.add(1, static_cast<std::size_t>(coord - 1));
  } else {
    const Dyadic honest = value_of(temp, empty_coalition(temp.rounds()), ctx);
    if (honest == Dyadic::zero()) fail("boost: the prefix protocol has no honest mass to amplify", level);
    const double gamma = std::min(1 - target, honest.to_double());
    LevelTrace nested;
    b_i.merge(bias_level(temp, gamma, ctx, nested));
    level.nested.push_back(std::move(nested));
  }
  const Dyadic v = value_of(temp, b_i, ctx);
  if (!v.at_least(target))
    fail("boost: prefix value " + v.str() + " stayed below the target " + std::to_string(target), level);
}

BitCoalition bias_level(const ProtocolSpec& p, double gamma, Context& ctx, LevelTrace& level) {
  const int k = p.rounds();
  level.rounds = k;
  level.gamma = gamma;
  if (k == 1) {
    const GreedyResult g = kkl_greedy(protocol_table(p), 1, gamma);
    BitCoalition out = empty_coalition(1);
    for (int coord : g.b) out.add(1, static_cast<std::size_t>(coord - 1));
    level.b_h = g.b;
    return out;
  }

  const int m = static_cast<int>(p.players) * p.bits[k - 1];
  std::size_t prefix_bits = 0;
  for (int i = 0; i < k - 1; ++i) prefix_bits += p.players * p.bits[i];
  if (m > kMaxArity) throw CapacityError(p.name + ": round " + std::to_string(k) + " has more than MAX_ARITY bits");
  if (prefix_bits + m > static_cast<std::size_t>(ctx.params.budget))
    throw CapacityError(p.name + ": " + std::to_string(prefix_bits + m) + " transcript bits exceed the exact budget");
  const std::size_t prefixes = std::size_t{1} << prefix_bits;
  level.prefixes = prefixes;

  // 1(a): the induced last-round functions.
  std::vector<BooleanFunction> induced(prefixes);
  parallel_chunks(prefixes, [&](std::size_t begin, std::size_t end) {
    Transcript t = p.blank_transcript();
    for (std::size_t a = begin; a < end; ++a) {
      t.set_from_index(k - 1, a);
      induced[a] = induced_round_function(p, t);
    }
  });

  // 1(b): family of prefixes with Pr[pi_alpha = 1] >= gamma/2.
  std::vector<std::size_t> members;
  std::vector<FamilyMember> family;
  for (std::size_t a = 0; a < prefixes; ++a)
    if (prob(induced[a], 1).at_least(gamma / 2)) {
      members.push_back(a);
      family.push_back({induced[a], 1});
    }
  level.family_size = family.size();
  level.family_mass = Dyadic::of(static_cast<std::int64_t>(family.size()), static_cast<int>(prefix_bits));
  if (!level.family_mass.at_least(gamma / 4))
    fail("step 1(b): family mass " + level.family_mass.str() + " is below gamma/4", level);

  const ResolvedParams rp = resolve_params(ctx.params, m, k, gamma / 2);
  level.family = family_common_set(family, rp, ctx.params.candidates, ctx.rng.next());
  if (!level.family.verified) fail("step 1(b): a covered member failed exact re-verification", level);

  // g(alpha) as h slots, largest element first; empty slots always lie in C_j.
  std::vector<std::vector<int>> slots(prefixes);
  auto alive = std::make_shared<std::vector<std::uint8_t>>(prefixes, 0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& bh = level.family.b_h[i];
    if (!bh) continue;
    (*alive)[members[i]] = 1;
    slots[members[i]].assign(bh->members().rbegin(), bh->members().rend());
  }
  std::int64_t alive_count = std::count(alive->begin(), alive->end(), 1);
  level.covered_mass = Dyadic::of(alive_count, static_cast<int>(prefix_bits));
  if (!level.covered_mass.at_least(gamma / 6))
    fail("step 1(b): Pr[g != bot] = " + level.covered_mass.str() + " is below gamma/6", level);

  // 1(c): first boost.
  BitCoalition b_i = empty_coalition(k - 1);
  ProtocolSpec temp = alive_protocol(p, alive);
  boost(temp, ctx.params.boost_target, b_i, ctx, level);
  level.mass_after_first_boost = value_of(temp, b_i, ctx);

  // 2: chisel loop.
  const int h = rp.h;
  std::vector<std::vector<int>> c_sets(h);
  for (auto& c : c_sets)
    for (int i = 1; i <= m; ++i) c.push_back(i);
  for (;;) {
    int j = -1;
    for (int s = 0; s < h; ++s)
      if (static_cast<int>(c_sets[s].size()) > rp.c) {
        j = s;
        break;
      }
    if (j < 0) break;

    const OptimalPlay play = optimal_play(temp, b_i, is_one, ctx.params.budget);
    auto mass_in = [&](const std::vector<int>& part) {
      std::vector<bool> in(m + 1, false);
      for (int x : part) in[x] = true;
      std::int64_t count = 0;
      for (std::size_t a = 0; a < prefixes; ++a)
        if (play.reached[a] && (*alive)[a] && (slots[a].size() <= static_cast<std::size_t>(j) || in[slots[a][j]]))
          ++count;
      return Dyadic::of(count, play.good_bits);
    };
    ChiselIteration it;
    it.slot = j + 1;
    it.size_before = c_sets[j].size();
    std::vector<int> kept;
    for (it.attempts = 1; it.attempts <= 16; ++it.attempts) {
      std::vector<int> shuffled = c_sets[j];
      for (std::size_t x = shuffled.size(); x > 1; --x) std::swap(shuffled[x - 1], shuffled[ctx.rng.below(x)]);
      const std::size_t half = (shuffled.size() + 1) / 2;
      std::vector<int> first(shuffled.begin(), shuffled.begin() + half);
      std::vector<int> second(shuffled.begin() + half, shuffled.end());
      const Dyadic a = mass_in(first), b = mass_in(second);
      kept = b > a ? second : first;
      if (std::max(a, b).at_least(3, 8)) break;
    }
    if (it.attempts > 16) fail("chisel: no half of C_" + std::to_string(j + 1) + " keeps mass 3/8", level);
    std::sort(kept.begin(), kept.end());
    c_sets[j] = kept;
    it.size_after = kept.size();

    std::vector<bool> in(m + 1, false);
    for (int x : kept) in[x] = true;
    auto next = std::make_shared<std::vector<std::uint8_t>>(*alive);
    for (std::size_t a = 0; a < prefixes; ++a)
      if ((*next)[a] && slots[a].size() > static_cast<std::size_t>(j) && !in[slots[a][j]]) (*next)[a] = 0;
    alive = next;
    temp = alive_protocol(p, alive);

    // Invariant (*): every surviving prefix has g_s(alpha) in C_s for all s.
    for (std::size_t a = 0; a < prefixes; ++a) {
      if (!(*alive)[a]) continue;
      for (std::size_t s = 0; s < slots[a].size(); ++s)
        if (!std::binary_search(c_sets[s].begin(), c_sets[s].end(), slots[a][s]))
          fail("chisel: invariant (*) broken at prefix " + std::to_string(a), level);
    }

    it.mass_kept = value_of(temp, b_i, ctx);
    if (!it.mass_kept.at_least(3, 8)) fail("chisel: mass after the split is " + it.mass_kept.str(), level);
    boost(temp, ctx.params.boost_target, b_i, ctx, level);
    it.mass_boosted = value_of(temp, b_i, ctx);
    it.b_i_bits = b_i.bit_count();
    level.chisel.push_back(it);
  }
  for (const auto& c : c_sets) level.c_sets.emplace_back(c);

  // 3: final boost.
  boost(temp, 1 - gamma / 2, b_i, ctx, level);
  level.mass_after_final_boost = value_of(temp, b_i, ctx);

  // 4: heavy players actually named by surviving prefixes (a subset of the union of C_j).
  std::vector<int> heavy;
  for (std::size_t a = 0; a < prefixes; ++a)
    if ((*alive)[a]) heavy.insert(heavy.end(), slots[a].begin(), slots[a].end());
  std::sort(heavy.begin(), heavy.end());
  heavy.erase(std::unique(heavy.begin(), heavy.end()), heavy.end());
  level.b_h = CoordSet(std::move(heavy));
  level.b_r = level.family.b_r;

  BitCoalition out = empty_coalition(k);
  for (int i = 0; i < k - 1; ++i) out.positions[i] = b_i.positions[i];
  for (int coord : level.b_r.united(level.b_h)) out.add(k, static_cast<std::size_t>(coord - 1));
  return out;
}

CoordSet owners_in_round(const ProtocolSpec& p, int round, const CoordSet& coords) {
  std::vector<int> out;
  for (int c : coords) out.push_back((c - 1) / p.bits[round - 1] + 1);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return CoordSet(std::move(out));
}

AttackReport attack_bits(const ProtocolSpec& p, const AttackParams& params, const std::string& command) {
  p.validate();
  if (p.domain != Domain::coin) throw InvalidArgument(p.name + ": biasing needs a coin protocol");
  const double gamma = params.gamma;
  if (!(gamma > 0 && gamma < 0.5)) throw InvalidArgument("gamma must be in (0, 1/2)");
  if (p.total_bits() > static_cast<std::size_t>(params.budget))
    throw CapacityError(p.name + ": exact attack needs " + std::to_string(p.total_bits()) +
                        " transcript bits, over the exact budget of " + std::to_string(params.budget));
  const Dyadic honest = exact_value(p, BitCoalition::none(p), is_one, params.budget);
  if (!honest.at_least(gamma))
    throw NotEnoughMass(p.name + ": Pr[pi = 1] = " + honest.str() + " is below gamma");

  AttackReport report;
  report.command = command;
  report.target = p.name;
  report.gamma = gamma;
  report.params = params;
  const int k = p.rounds();
  if (k == 1) {
    report.greedy = kkl_greedy(protocol_table(p), 1, gamma);
    report.bits = BitCoalition::none(p);
    for (int coord : report.greedy->b) report.bits.add(1, static_cast<std::size_t>(coord - 1));
    report.claimed_value = report.greedy->final_prob.to_double();
    report.b_h = owners_in_round(p, 1, report.greedy->b);
  } else {
    // Resolve once up front so degenerate paper-mode values fail before any work.
    resolve_params(params, static_cast<int>(p.players) * p.bits[k - 1], k, gamma / 2);
    Context ctx{params, Rng(params.seed)};
    LevelTrace level;
    report.bits = bias_level(p, gamma, ctx, level);
    report.claimed_value = level.mass_after_final_boost.to_double() * (1 - gamma / 2);
    report.b_r = owners_in_round(p, k, level.b_r);
    report.b_h = owners_in_round(p, k, level.b_h);
    BitCoalition prefix = report.bits;
    prefix.positions[k - 1].clear();
    report.b_i = prefix.owners(p);
    report.level = std::move(level);
  }
  report.bit_count = report.bits.bit_count();
  report.bit_level_value = exact_value(p, report.bits, is_one, params.budget);
  report.b = report.bits.owners(p);
  report.verified_value = exact_adversary_value(p, report.b, 1, params.budget);
  report.success = report.verified_value.at_least(1 - gamma);
  const double l = static_cast<double>(p.players);
  report.budget_bound = 1e7 * l / (gamma * stats::iterated_log2(l, k));
  return report;
}

}  // namespace

AttackReport bias_protocol(const ProtocolSpec& p, const AttackParams& params) {
  for (int r : p.bits)
    if (r != 1) throw InvalidArgument(p.name + ": bias_protocol needs one bit per player per round; use multibit");
  return attack_bits(p, params, "protocol");
}

AttackReport bias_protocol_multibit(const ProtocolSpec& p, const AttackParams& params) {
  return attack_bits(p, params, "multibit");
}

std::vector<ProbeRow> round_lb_probe(const std::vector<ProtocolSpec>& corpus, double budget_fraction,
                                     const AttackParams& params) {
  std::vector<ProbeRow> rows;
  for (const auto& p : corpus) {
    ProbeRow row;
    row.protocol = p.name;
    row.players = p.players;
    row.rounds = p.rounds();
    try {
      const bool multibit = std::any_of(p.bits.begin(), p.bits.end(), [](int r) { return r != 1; });
      const AttackReport rep = multibit ? bias_protocol_multibit(p, params) : bias_protocol(p, params);
      row.coalition = rep.b.size();
      row.fraction = static_cast<double>(row.coalition) / static_cast<double>(p.players);
      row.value = rep.verified_value;
      row.within_budget = rep.success && row.fraction <= budget_fraction;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace coinflip
