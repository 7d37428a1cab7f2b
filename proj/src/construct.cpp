#include "coinflip/construct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coinflip/error.hpp"
#include "coinflip/stats.hpp"

namespace coinflip {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

std::string stage_name(std::size_t index) { return "stage " + std::to_string(index + 1); }

// beta <= 2^s, written to avoid shifting past 63.
bool beta_fits(int beta, std::size_t s) { return s >= 31 || static_cast<std::int64_t>(beta) <= (std::int64_t{1} << s); }

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void check_beta(const Assembly& a, int beta) {
  if (beta < 1) throw InvalidArgument("lightest bin needs beta >= 1, got " + std::to_string(beta));
  if (!beta_fits(beta, a.s()))
    throw ScheduleError("lightest bin: beta = " + std::to_string(beta) + " exceeds 2^s with s = " +
                        std::to_string(a.s()));
}

LightestBinResult select(const Assembly& a, int beta, std::vector<int> votes, std::vector<std::size_t> good_hist) {
  LightestBinResult r;
  r.histogram.assign(beta, 0);
  for (int v : votes) {
    if (v < 0 || v >= beta) throw InvalidArgument("vote " + std::to_string(v) + " outside [0, beta)");
    ++r.histogram[v];
  }
  r.good_histogram = std::move(good_hist);
  r.chosen = static_cast<int>(std::min_element(r.histogram.begin(), r.histogram.end()) - r.histogram.begin());
  const std::size_t target = a.n() == 0 ? 0 : ceil_div(a.n(), beta);
  r.uniform_encoding = (beta & (beta - 1)) == 0;

  Assembly& out = r.out;
  out.universe = a.universe;
  out.bad = a.bad;
  std::vector<std::uint8_t> used(a.n(), 0);
  std::size_t voted_bad = 0;
  for (std::size_t j = 0; j < a.n(); ++j) {
    if (votes[j] != r.chosen) continue;
    used[j] = 1;
    out.sets.push_back(a.sets[j]);
    out.flagged.push_back(a.flagged[j]);
    voted_bad += a.set_is_bad(j);
  }
  r.voted_sets = out.sets.size();
  for (std::size_t j = 0; j < a.n() && out.sets.size() < target; ++j) {
    if (used[j]) continue;
    out.sets.push_back(a.sets[j]);
    out.flagged.push_back(1);
    ++r.padded;
  }
  // Certain bound: bad voters in the bin plus padding.
  out.declared_b = std::min<double>(static_cast<double>(target),
                                    std::min<double>(a.declared_b, static_cast<double>(voted_bad)) +
                                        static_cast<double>(r.padded));
  r.votes = std::move(votes);
  return r;
}

}  // namespace

// --- Assembly ----------------------------------------------------------------

bool Assembly::set_is_bad(std::size_t j) const {
  if (flagged[j]) return true;
  for (int p : sets[j])
    if (bad[p]) return true;
  return false;
}

std::size_t Assembly::bad_set_count() const {
  std::size_t c = 0;
  for (std::size_t j = 0; j < sets.size(); ++j) c += set_is_bad(j);
  return c;
}

void Assembly::validate() const {
  if (bad.size() != universe + 1) throw InvalidArgument("assembly: label vector does not match the universe");
  if (flagged.size() != sets.size()) throw InvalidArgument("assembly: flag vector does not match the set count");
  std::vector<std::uint8_t> seen(universe + 1, 0);
  for (std::size_t j = 0; j < sets.size(); ++j) {
    if (sets[j].size() != s()) throw InvalidArgument("assembly: set " + std::to_string(j + 1) + " has the wrong size");
    for (int p : sets[j]) {
      if (p < 1 || static_cast<std::size_t>(p) > universe)
        throw InvalidArgument("assembly: player " + std::to_string(p) + " outside the universe");
      if (seen[p]++) throw InvalidArgument("assembly: player " + std::to_string(p) + " in two sets");
    }
  }
  if (static_cast<double>(bad_set_count()) > declared_b + 1e-9)
    throw InvalidArgument("assembly: " + std::to_string(bad_set_count()) + " bad sets exceed declared b = " +
                          fmt(declared_b));
}

Assembly singleton_assembly(std::size_t universe, const CoordSet& bad) {
  bad.check_within(static_cast<int>(universe));
  Assembly a;
  a.universe = universe;
  a.bad.assign(universe + 1, 0);
  for (int p : bad) a.bad[p] = 1;
  a.sets.reserve(universe);
  for (std::size_t p = 1; p <= universe; ++p) a.sets.push_back({static_cast<int>(p)});
  a.flagged.assign(universe, 0);
  a.declared_b = static_cast<double>(bad.size());
  return a;
}

Assembly grouping(const Assembly& a, int t) {
  if (t < 1) throw InvalidArgument("grouping needs t >= 1");
  Assembly out;
  out.universe = a.universe;
  out.bad = a.bad;
  out.declared_b = a.declared_b;
  const std::size_t parts = a.n() / t;
  out.sets.reserve(parts);
  for (std::size_t q = 0; q < parts; ++q) {
    std::vector<int> merged;
    std::uint8_t flag = 0;
    for (int k = 0; k < t; ++k) {
      const std::size_t j = q * t + k;
      merged.insert(merged.end(), a.sets[j].begin(), a.sets[j].end());
      flag |= a.flagged[j];
    }
    std::sort(merged.begin(), merged.end());
    out.sets.push_back(std::move(merged));
    out.flagged.push_back(flag);
  }
  return out;
}

Assembly splitting(const Assembly& a, int t) {
  if (t < 1) throw InvalidArgument("splitting needs t >= 1");
  if (a.s() % t != 0)
    throw ScheduleError("splitting: t = " + std::to_string(t) + " does not divide s = " + std::to_string(a.s()));
  Assembly out;
  out.universe = a.universe;
  out.bad = a.bad;
  out.declared_b = a.declared_b * t;
  const std::size_t piece = a.s() / t;
  for (std::size_t j = 0; j < a.n(); ++j)
    for (int k = 0; k < t; ++k) {
      out.sets.emplace_back(a.sets[j].begin() + k * piece, a.sets[j].begin() + (k + 1) * piece);
      out.flagged.push_back(a.flagged[j]);
    }
  return out;
}

// --- lightest bin -------------------------------------------------------------

int vote_of(const std::vector<std::uint8_t>& bits, int beta) {
  if (beta < 1) throw InvalidArgument("vote needs beta >= 1");
  const std::uint64_t m = static_cast<std::uint64_t>(beta);
  std::uint64_t acc = 0, pw = 1 % m;
  for (std::uint8_t b : bits) {
    if (b) acc = (acc + pw) % m;
    pw = (pw * 2) % m;
  }
  return static_cast<int>(acc);
}

BadVoter pile_on_lightest() {
  return [](const VoteContext& ctx) {
    const auto& h = ctx.good_histogram;
    const int bin = static_cast<int>(std::min_element(h.begin(), h.end()) - h.begin());
    std::size_t bad_sets = 0;
    for (int v : ctx.votes) bad_sets += v < 0;
    return std::vector<int>(bad_sets, bin);
  };
}

LightestBinResult lightest_bin(const Assembly& a, int beta, Rng& rng, const LightestBinOptions& options) {
  check_beta(a, beta);
  const std::size_t s = a.s();
  const bool reject = options.encoding == VoteEncoding::reject && s <= 62;
  const std::uint64_t limit = reject ? ((std::uint64_t{1} << s) / beta) * beta : 0;

  std::vector<int> votes(a.n(), -1);
  std::vector<std::size_t> good_hist(beta, 0);
  std::vector<std::uint8_t> bits(s);
  std::uint64_t rerolls = 0;
  for (std::size_t j = 0; j < a.n(); ++j) {
    if (a.set_is_bad(j)) continue;
    for (;;) {
      for (auto& b : bits) b = rng.bit();
      if (!reject) break;
      std::uint64_t value = 0;
      for (std::size_t k = 0; k < s; ++k) value |= std::uint64_t{bits[k]} << k;
      if (value < limit) break;
      ++rerolls;
    }
    votes[j] = vote_of(bits, beta);
    ++good_hist[votes[j]];
  }

  const VoteContext ctx{a, beta, votes, good_hist};
  const std::vector<int> bad_votes = options.adversary ? options.adversary(ctx) : pile_on_lightest()(ctx);
  std::size_t k = 0;
  for (std::size_t j = 0; j < a.n(); ++j) {
    if (votes[j] >= 0) continue;
    if (k >= bad_votes.size()) throw InvalidArgument("adversary returned too few votes");
    votes[j] = bad_votes[k++];
  }
  if (k != bad_votes.size()) throw InvalidArgument("adversary returned too many votes");

  auto r = select(a, beta, std::move(votes), std::move(good_hist));
  r.rerolls = rerolls;
  r.uniform_encoding = reject || r.uniform_encoding;
  return r;
}

LightestBinResult lightest_bin_from_votes(const Assembly& a, int beta, const std::vector<int>& votes) {
  check_beta(a, beta);
  if (votes.size() != a.n()) throw InvalidArgument("need one vote per set");
  std::vector<std::size_t> good_hist(beta, 0);
  for (std::size_t j = 0; j < a.n(); ++j)
    if (!a.set_is_bad(j) && votes[j] >= 0 && votes[j] < beta) ++good_hist[votes[j]];
  return select(a, beta, votes, std::move(good_hist));
}

double lightest_bin_failure_bound(std::size_t n, std::size_t b, int beta, double delta) {
  if (b > n) throw InvalidArgument("b exceeds n");
  return beta * std::exp(-delta * delta * static_cast<double>(n - b) / (2.0 * beta));
}

bool verify_transformation_arithmetic(const Assembly& in, const Assembly& out, TransformKind op,
                                      const TransformParams& params) {
  try {
    out.validate();
  } catch (const InvalidArgument&) {
    return false;
  }
  const double b = static_cast<double>(in.bad_set_count());
  const double n = static_cast<double>(in.n());
  const double measured = static_cast<double>(out.bad_set_count());
  switch (op) {
    case TransformKind::grouping:
      if (out.n() != in.n() / params.t) return false;
      if (out.n() > 0 && out.s() != in.s() * params.t) return false;
      return measured <= b;
    case TransformKind::splitting:
      if (out.n() != in.n() * params.t) return false;
      if (out.n() > 0 && out.s() != in.s() / params.t) return false;
      return measured <= b * params.t;
    case TransformKind::lightest_bin: {
      const std::size_t target = ceil_div(in.n(), params.beta);
      if (out.n() != target || (out.n() > 0 && out.s() != in.s())) return false;
      const double slack = static_cast<double>(target) - n / params.beta;
      return measured <= b / params.beta + params.delta * (n - b) / params.beta + slack + 1e-9;
    }
  }
  return false;
}

// --- resilient functions --------------------------------------------------------

ResilientChoice ResilientChoice::parse(const std::string& text) {
  ResilientChoice c;
  if (text == "recmaj3") {
    c.kind = ResilientKind::recmaj3;
  } else if (text == "majority") {
    c.kind = ResilientKind::majority;
  } else if (text == "parity") {
    c.kind = ResilientKind::parity;
  } else if (text.rfind("tribes:", 0) == 0) {
    c.kind = ResilientKind::tribes;
    try {
      std::size_t used = 0;
      c.width = std::stoi(text.substr(7), &used);
      if (used != text.size() - 7) throw InvalidArgument("");
    } catch (const std::exception&) {
      throw InvalidArgument("bad tribes width in '" + text + "'");
    }
    if (c.width < 1) throw InvalidArgument("tribes width must be >= 1");
  } else {
    throw InvalidArgument("unknown resilient function '" + text + "'");
  }
  return c;
}

std::string ResilientChoice::str() const {
  switch (kind) {
    case ResilientKind::recmaj3: return "recmaj3";
    case ResilientKind::majority: return "majority";
    case ResilientKind::parity: return "parity";
    case ResilientKind::tribes: return "tribes:" + std::to_string(width);
  }
  return "";
}

ResilientFunction make_resilient(const ResilientChoice& choice, std::size_t n) {
  if (n == 0) throw InvalidArgument("resilient function over zero sets");
  ResilientFunction f;
  f.choice = choice;
  switch (choice.kind) {
    case ResilientKind::recmaj3: {
      std::size_t a = 1;
      while (a * 3 <= n) {
        a *= 3;
        ++f.depth;
      }
      f.arity = static_cast<int>(a);
      break;
    }
    case ResilientKind::majority:
      f.arity = static_cast<int>(n % 2 == 1 ? n : n - 1);
      break;
    case ResilientKind::parity:
      f.arity = static_cast<int>(n);
      break;
    case ResilientKind::tribes:
      if (choice.width < 1 || n < static_cast<std::size_t>(choice.width))
        throw InvalidArgument("tribes of width " + std::to_string(choice.width) + " need at least that many sets, got " +
                              std::to_string(n));
      f.tribes = static_cast<int>(n / choice.width);
      f.arity = f.tribes * choice.width;
      break;
  }
  return f;
}

bool ResilientFunction::operator()(const std::vector<std::uint8_t>& bits) const {
  if (bits.size() < static_cast<std::size_t>(arity)) throw InvalidArgument("too few resilient-function inputs");
  switch (choice.kind) {
    case ResilientKind::recmaj3: {
      std::vector<std::uint8_t> level(bits.begin(), bits.begin() + arity);
      while (level.size() > 1) {
        std::vector<std::uint8_t> next(level.size() / 3);
        for (std::size_t q = 0; q < next.size(); ++q)
          next[q] = level[3 * q] + level[3 * q + 1] + level[3 * q + 2] >= 2;
        level = std::move(next);
      }
      return level[0];
    }
    case ResilientKind::majority: {
      int ones = 0;
      for (int k = 0; k < arity; ++k) ones += bits[k];
      return 2 * ones > arity;
    }
    case ResilientKind::parity: {
      std::uint8_t x = 0;
      for (int k = 0; k < arity; ++k) x ^= bits[k];
      return x;
    }
    case ResilientKind::tribes:
      for (int q = 0; q < tribes; ++q) {
        bool all = true;
        for (int k = 0; k < choice.width && all; ++k) all = bits[q * choice.width + k];
        if (all) return true;
      }
      return false;
  }
  return false;
}

std::optional<BooleanFunction> ResilientFunction::table() const {
  if (arity > kMaxArity) return std::nullopt;
  switch (choice.kind) {
    case ResilientKind::recmaj3: return builtin::recursive_majority3(depth);
    case ResilientKind::majority: return builtin::majority(arity);
    case ResilientKind::parity: return builtin::parity(arity);
    case ResilientKind::tribes: return builtin::tribes(tribes, choice.width);
  }
  return std::nullopt;
}

double ResilientFunction::prob_one() const {
  if (choice.kind == ResilientKind::tribes) return 1.0 - std::pow(1.0 - std::ldexp(1.0, -choice.width), tribes);
  return 0.5;
}

std::optional<Dyadic> ResilientFunction::exact_prob_one() const {
  const auto t = table();
  if (!t) return std::nullopt;
  return prob(*t, 1);
}

double ResilientFunction::imbalance() const {
  if (const auto p = exact_prob_one()) return std::abs(p->to_double() - 0.5);
  return std::abs(prob_one() - 0.5);
}

ProtocolSpec resilient_round(const Assembly& a, const ResilientChoice& choice) {
  const ResilientFunction fn = make_resilient(choice, a.n());
  std::vector<int> reps;
  for (int j = 0; j < fn.arity; ++j) reps.push_back(a.sets[j].front());
  ProtocolSpec p;
  p.name = "resilient-round:" + choice.str();
  p.players = a.universe;
  p.bits = {1};
  p.domain = Domain::coin;
  p.evaluate = [fn, reps](const Transcript& t) -> Outcome {
    std::vector<std::uint8_t> bits(reps.size());
    for (std::size_t k = 0; k < reps.size(); ++k) bits[k] = t.bit(1, reps[k] - 1);
    return fn(bits) ? 1 : 0;
  };
  return p;
}

double resilient_adversarial_distance(const Assembly& a, const ResilientChoice& choice) {
  const ResilientFunction fn = make_resilient(choice, a.n());
  const auto table = fn.table();
  if (!table) throw CapacityError("resilient function arity " + std::to_string(fn.arity) + " exceeds the table cap");
  std::vector<int> bad;
  for (int j = 0; j < fn.arity; ++j)
    if (a.set_is_bad(j)) bad.push_back(j + 1);
  if (bad.size() == static_cast<std::size_t>(fn.arity)) return 0.5;
  double best = 0;
  for (int o : {0, 1})
    best = std::max(best, prob(restrict_optimal(*table, CoordSet(bad), o), o).to_double() - 0.5);
  return best;
}

// --- pipeline --------------------------------------------------------------------

Schedule paper_schedule(std::size_t players, int k, double gamma, const ResilientChoice& resilient) {
  if (players < 1) throw InvalidArgument("pipeline needs at least one player");
  if (k < 1) throw InvalidArgument("pipeline needs k >= 1");
  Schedule sch;
  sch.config.gamma = gamma;
  sch.config.resilient = resilient;
  const double l = static_cast<double>(players);
  std::size_t n = players, s = 1;
  for (int i = 1; i <= k - 1; ++i) {
    const std::string name = stage_name(i - 1);
    StageConfig st;
    double t_real = 0, beta_real = 0;
    const double li = stats::iterated_log2(l, i);
    if (i == 1) {
      st.op = TransformKind::grouping;
      t_real = 3 * li;
      beta_real = l / (li * li * li);
    } else {
      st.op = TransformKind::splitting;
      t_real = stats::iterated_log2(l, i - 1) / li;
      beta_real = t_real * t_real * t_real;
    }
    st.delta = std::pow(li, -0.25);

    int t = std::max(1, static_cast<int>(std::floor(t_real)));
    if (static_cast<double>(t) != t_real)
      sch.warnings.push_back(name + ": t = " + fmt(t_real) + " rounded to " + std::to_string(t));
    if (st.op == TransformKind::grouping) {
      if (static_cast<std::size_t>(t) > n) {
        sch.warnings.push_back(name + ": t = " + std::to_string(t) + " exceeds the " + std::to_string(n) +
                               " available sets, clamped");
        t = static_cast<int>(n);
      }
      if (n % t != 0)
        sch.warnings.push_back(name + ": grouping drops " + std::to_string(n % t) + " sets (" +
                               std::to_string((n % t) * s) + " players unused)");
      n /= t;
      s *= t;
    } else {
      int d = t;
      while (s % d != 0) --d;
      if (d != t)
        sch.warnings.push_back(name + ": t = " + std::to_string(t) + " lowered to " + std::to_string(d) +
                               " to divide s = " + std::to_string(s));
      t = d;
      n *= t;
      s /= t;
    }
    st.t = t;

    int beta = std::max(1, static_cast<int>(std::min(std::floor(beta_real), 1e9)));
    if (static_cast<double>(beta) != beta_real)
      sch.warnings.push_back(name + ": beta = " + fmt(beta_real) + " rounded to " + std::to_string(beta));
    if (!beta_fits(beta, s)) {
      beta = 1 << s;
      sch.warnings.push_back(name + ": beta clamped to 2^s = " + std::to_string(beta));
    }
    if (beta == 1) sch.warnings.push_back(name + ": beta = 1, the vote is an identity stage");
    st.beta = beta;
    n = ceil_div(n, beta);
    sch.config.stages.push_back(st);
  }
  try {
    const ResilientFunction fn = make_resilient(resilient, n);
    if (static_cast<std::size_t>(fn.arity) != n)
      sch.warnings.push_back("round " + std::to_string(k) + ": " + resilient.str() + " reads " +
                             std::to_string(fn.arity) + " of " + std::to_string(n) + " sets");
  } catch (const InvalidArgument& e) {
    throw ScheduleError("round " + std::to_string(k) + ": " + e.what());
  }
  return sch;
}

std::vector<StageConfig> parse_stages(const std::string& text) {
  std::vector<StageConfig> out;
  if (text.empty()) return out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ',')) {
    std::vector<std::string> parts;
    std::stringstream one(item);
    std::string part;
    while (std::getline(one, part, ':')) parts.push_back(part);
    if (parts.size() < 3 || parts.size() > 4) throw InvalidArgument("stage '" + item + "' is not op:t:beta[:delta]");
    StageConfig st;
    if (parts[0] == "group") {
      st.op = TransformKind::grouping;
    } else if (parts[0] == "split") {
      st.op = TransformKind::splitting;
    } else {
      throw InvalidArgument("stage '" + item + "': op must be group or split");
    }
    try {
      st.t = std::stoi(parts[1]);
      st.beta = std::stoi(parts[2]);
      if (parts.size() == 4) st.delta = std::stod(parts[3]);
    } catch (const std::exception&) {
      throw InvalidArgument("stage '" + item + "' has a non-numeric field");
    }
    out.push_back(st);
  }
  return out;
}

Pipeline plan_pipeline(const PipelineConfig& cfg, std::size_t players) {
  if (players < 1) throw ScheduleError("pipeline needs at least one player");
  Pipeline plan;
  plan.players = players;
  plan.config = cfg;
  std::size_t n = players, s = 1;
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    const StageConfig& st = cfg.stages[i];
    const std::string name = stage_name(i);
    StageShape shape{n, s, 0, 0, 0};
    if (st.t < 1) throw ScheduleError(name + ": t = " + std::to_string(st.t) + " < 1");
    if (st.op == TransformKind::grouping) {
      if (n / st.t == 0)
        throw ScheduleError(name + ": grouping " + std::to_string(n) + " sets by t = " + std::to_string(st.t) +
                            " leaves no sets");
      n /= st.t;
      s *= st.t;
    } else if (st.op == TransformKind::splitting) {
      if (s % st.t != 0)
        throw ScheduleError(name + ": t = " + std::to_string(st.t) + " does not divide s = " + std::to_string(s));
      n *= st.t;
      s /= st.t;
    } else {
      throw ScheduleError(name + ": transformation must be grouping or splitting");
    }
    if (st.beta < 1) throw ScheduleError(name + ": beta = " + std::to_string(st.beta) + " < 1");
    if (!beta_fits(st.beta, s))
      throw ScheduleError(name + ": beta = " + std::to_string(st.beta) + " exceeds 2^s with s = " + std::to_string(s));
    shape.n = n;
    shape.s = s;
    n = ceil_div(n, st.beta);
    shape.n_after = n;
    plan.shapes.push_back(shape);
  }
  try {
    plan.fn = make_resilient(cfg.resilient, n);
  } catch (const InvalidArgument& e) {
    throw ScheduleError("round " + std::to_string(cfg.rounds()) + ": " + e.what());
  }
  plan.first = singleton_assembly(players);
  if (!cfg.stages.empty()) {
    const StageConfig& st = cfg.stages.front();
    plan.first = st.op == TransformKind::grouping ? grouping(plan.first, st.t) : splitting(plan.first, st.t);
  }
  return plan;
}

namespace {

// Shared by the evaluator and trace_pipeline; `trace` may be null.
Outcome run_plan(const Pipeline& plan, const Transcript& t, PipelineTrace* trace) {
  Assembly a;
  if (trace) trace->assemblies.push_back(singleton_assembly(plan.players));
  std::vector<std::uint8_t> bits;
  for (std::size_t i = 0; i < plan.config.stages.size(); ++i) {
    const StageConfig& st = plan.config.stages[i];
    if (i == 0) {
      a = plan.first;
    } else {
      a = st.op == TransformKind::grouping ? grouping(a, st.t) : splitting(a, st.t);
    }
    if (trace) trace->assemblies.push_back(a);
    const int round = static_cast<int>(i) + 1;
    std::vector<int> votes(a.n());
    bits.resize(a.s());
    for (std::size_t j = 0; j < a.n(); ++j) {
      for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = t.bit(round, a.sets[j][k] - 1);
      votes[j] = vote_of(bits, st.beta);
    }
    auto sel = lightest_bin_from_votes(a, st.beta, votes);
    a = std::move(sel.out);
    if (trace) {
      trace->assemblies.push_back(a);
      trace->selections.push_back(std::move(sel));
    }
  }
  if (plan.config.stages.empty()) a = plan.first;
  const int last = plan.config.rounds();
  std::vector<std::uint8_t> inputs(plan.fn.arity);
  for (int j = 0; j < plan.fn.arity; ++j) inputs[j] = t.bit(last, a.sets[j].front() - 1);
  const Outcome out = plan.fn(inputs) ? 1 : 0;
  if (trace) {
    trace->final_bits = std::move(inputs);
    trace->output = out;
  }
  return out;
}

}  // namespace

ProtocolSpec pipeline_protocol(const Pipeline& plan) {
  ProtocolSpec p;
  p.name = "lightest-bin-pipeline";
  p.players = plan.players;
  p.bits.assign(plan.config.rounds(), 1);
  p.domain = Domain::coin;
  p.evaluate = [plan](const Transcript& t) { return run_plan(plan, t, nullptr); };
  return p;
}

ProtocolSpec build_pipeline(const PipelineConfig& cfg, std::size_t players) {
  return pipeline_protocol(plan_pipeline(cfg, players));
}

PipelineTrace trace_pipeline(const Pipeline& plan, const Transcript& t) {
  PipelineTrace trace;
  run_plan(plan, t, &trace);
  return trace;
}

PipelineTrace simulate_pipeline(const Pipeline& plan, const CoordSet& bad, Rng& rng, const BadVoter& adversary,
                                bool bad_bit) {
  PipelineTrace trace;
  Assembly a = singleton_assembly(plan.players, bad);
  trace.assemblies.push_back(a);
  for (const StageConfig& st : plan.config.stages) {
    a = st.op == TransformKind::grouping ? grouping(a, st.t) : splitting(a, st.t);
    trace.assemblies.push_back(a);
    LightestBinOptions options;
    options.adversary = adversary;
    auto sel = lightest_bin(a, st.beta, rng, options);
    a = sel.out;
    trace.assemblies.push_back(a);
    trace.selections.push_back(std::move(sel));
  }
  trace.final_bits.resize(plan.fn.arity);
  for (int j = 0; j < plan.fn.arity; ++j) {
    const int rep = a.sets[j].front();
    trace.final_bits[j] = a.bad[rep] ? bad_bit : rng.bit();
  }
  trace.output = plan.fn(trace.final_bits) ? 1 : 0;
  return trace;
}

}  // namespace coinflip
