// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "coinflip/attack.hpp"
#include "coinflip/boolfn.hpp"
#include "coinflip/construct.hpp"
#include "coinflip/protocol.hpp"
#include "coinflip/registry.hpp"
#include "coinflip/rng.hpp"
#include "coinflip/stats.hpp"
#include "oracles.hpp"

#ifndef COINFLIP_CLI
#error "COINFLIP_CLI must name the coinflip binary"
#endif

using namespace coinflip;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream line;
  line.precision(3);
  line << (r.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << r.detail << " (" << std::fixed << secs
       << " s, limit " << limit_s << " s)";
  if (secs > limit_s) line << " [over time limit]";
  std::cout << line.str() << std::endl;
  if (!r.pass) ++failures;
}

AttackParams desk(double gamma, std::uint64_t seed) {
  AttackParams p;
  p.gamma = gamma;
  p.seed = seed;
  return p;
}

std::string str(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

// --- criteria ---------------------------------------------------------------

Verdict gain_identity() {
  std::size_t checked = 0, bad = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto f = builtin::random(10, 0.5, 1000 + s);
    const Dyadic base = prob(f, 1);
    for (int i = 1; i <= 10; ++i) {
      ++checked;
      if (prob(restrict_optimal(f, CoordSet({i}), 1), 1) - base != influence(f, i).half()) ++bad;
    }
  }
  return {bad == 0, std::to_string(checked) + " (f, i) pairs, " + std::to_string(bad) + " mismatches"};
}

std::vector<BooleanFunction> massive_corpus(int arity, std::size_t count, double gamma, std::uint64_t seed) {
  std::vector<BooleanFunction> out;
  for (std::uint64_t s = seed; out.size() < count; ++s) {
    auto f = builtin::random(arity, 0.5, s);
    if (prob(f, 1).at_least(gamma)) out.push_back(std::move(f));
  }
  return out;
}

Verdict process_success() {
  const auto corpus = massive_corpus(12, 50, 0.25, 2000);
  AttackParams p = desk(0.25, 0);
  p.h = 8;
  p.delta = 0.1;
  const int r = resolve_params(p, 12, 1, 0.25).r;
  std::size_t successes = 0, max_bh = 0;
  const std::size_t runs = 2000;
  for (std::size_t run = 0; run < runs; ++run) {
    Rng rng(Rng::derive(77, run));
    const auto res = semi_random_process(corpus[run % corpus.size()], 1, p, rng);
    successes += res.success;
    max_bh = std::max(max_bh, res.b_h.size());
  }
  const double frac = static_cast<double>(successes) / runs;
  return {frac >= 0.9 && max_bh <= 8,
          "success " + std::to_string(successes) + "/" + std::to_string(runs) + ", max |B_H| " +
              std::to_string(max_bh) + ", r " + std::to_string(r)};
}

Verdict family_coverage() {
  std::vector<FamilyMember> family;
  for (auto& f : massive_corpus(12, 200, 0.25, 3000)) family.push_back({std::move(f), 1});
  AttackParams p = desk(0.25, 5);
  p.h = 8;
  p.delta = 1.0 / 3;
  p.candidates = 50;
  const auto res = family_common_set(family, p);
  std::size_t rechecked = 0;
  for (std::size_t i = 0; i < family.size(); ++i)
    if (res.b_h[i] && can_bias(family[i].f, res.b_r.united(*res.b_h[i]), 1, 0.25)) ++rechecked;
  return {res.coverage >= 2.0 / 3 && res.verified && rechecked == res.covered,
          "coverage " + str(res.coverage) + " (" + std::to_string(res.covered) + "/200), |B_R| " +
              std::to_string(res.b_r.size()) + ", re-verified " + std::to_string(rechecked)};
}

Verdict protocol_post_condition() {
  bool ok = true;
  std::string detail;
  for (const Json& spec : two_round_corpus()) {
    const auto p = protocol_from_json(spec);
    const std::string label = spec.value("label", p.name);
    const auto r = bias_protocol(p, desk(0.25, 7));
    const double oracle_value = oracle::game_value(p, r.b, 1);
    const bool parity = label.rfind("parity", 0) == 0;
    const bool row_ok = oracle_value >= 0.75 && r.verified_value.to_double() == oracle_value &&
                        (!parity || r.b.size() == 1);
    ok = ok && row_ok;
    detail += label + " |B|=" + std::to_string(r.b.size()) + " value=" + r.verified_value.str() + "; ";
  }
  return {ok, detail};
}

Verdict multibit_wrapper() {
  bool ok = true;
  std::string detail;
  for (const Json& spec : multibit_corpus()) {
    const auto p = protocol_from_json(spec);
    const std::string label = spec.value("label", p.name);
    const auto r = bias_protocol_multibit(p, desk(0.25, 2));
    const bool row_ok = r.bit_level_value && r.verified_value >= *r.bit_level_value && r.b.size() <= r.bit_count &&
                        oracle::game_value(p, r.b, 1) == r.verified_value.to_double();
    ok = ok && row_ok;
    detail += label + " |B'|=" + std::to_string(r.b.size()) + "/" + std::to_string(r.bit_count) + "; ";
  }
  return {ok, detail};
}

Verdict kkl_majority() {
  // Binomial oracle first: the fewest fixed coordinates b with Pr[Bin(9-b, 1/2) >= 5-b] >= 0.95.
  int expected = -1;
  for (int b = 0; b <= 9 && expected < 0; ++b)
    if (oracle::binomial_tail(9 - b, 5 - b) >= 0.95) expected = b;
  if (expected != 4) return {false, "binomial oracle gives " + std::to_string(expected)};
  const auto res = kkl_greedy(builtin::majority(9), 1, 0.05);
  return {static_cast<int>(res.b.size()) == expected,
          "|B|=" + std::to_string(res.b.size()) + " oracle " + std::to_string(expected) + " final " +
              res.final_prob.str()};
}

Verdict lightest_bin_bound() {
  const std::size_t n = 4096;
  const int beta = 64;
  const double delta = 0.2;
  const Assembly a = grouping(singleton_assembly(n * 6), 6);
  const double floor_count = (1 - delta) * n / beta;
  const double bound = lightest_bin_failure_bound(n, 0, beta, delta);
  const std::size_t runs = 10000;
  std::size_t below = 0;
  bool chosen_ok = true;
  for (std::size_t run = 0; run < runs; ++run) {
    Rng rng(Rng::derive(4096, run));
    const auto res = lightest_bin(a, beta, rng);
    std::size_t lightest = n;
    for (std::size_t c : res.histogram) lightest = std::min(lightest, c);
    below += static_cast<double>(lightest) < floor_count;
    chosen_ok = chosen_ok && res.voted_sets * beta <= n;
  }
  const double frac = static_cast<double>(below) / runs;
  return {frac <= bound && chosen_ok,
          "below-floor fraction " + str(frac) + " <= bound " + str(bound) + ", chosen bin <= n/beta every run: " +
              (chosen_ok ? "yes" : "no")};
}

Verdict pipeline_honesty() {
  const Schedule s = paper_schedule(4096, 2);
  const Pipeline plan = plan_pipeline(s.config, 4096);
  const auto p = pipeline_protocol(plan);
  const auto mc = monte_carlo_value(p, honest_strategy(), Outcome{1}, 100000, 8);
  const double imbalance = plan.fn.imbalance();
  const double gap = std::fabs(mc.estimate - 0.5);
  return {gap <= imbalance + mc.ci_halfwidth,
          "estimate " + str(mc.estimate) + ", |est - 1/2| " + str(gap) + " <= imbalance " + str(imbalance) +
              " + ci " + str(mc.ci_halfwidth) + " (" + s.config.resilient.str() + " arity " +
              std::to_string(plan.fn.arity) + ")"};
}

Verdict leader_reduction() {
  bool ok = true;
  std::string detail;
  for (const char* text : {R"({"kind":"builtin","name":"leader-mod","players":3})",
                           R"({"kind":"builtin","name":"leader-fixed","players":3,"params":{"leader":2}})"}) {
    const auto leader = protocol_from_json(Json::parse(text));
    const auto coin = leader_to_coinflip(leader);
    for (int i = 1; i <= 3; ++i) {
      const CoordSet b({i});
      const Dyadic good = Dyadic::one() - exact_bad_leader_value(leader, b);
      const Dyadic limit = Dyadic::one() - good.half();
      for (Outcome o : {Outcome{0}, Outcome{1}}) {
        const Dyadic v = exact_adversary_value(coin, b, o);
        ok = ok && v <= limit;
      }
      detail += leader.name + "{" + std::to_string(i) + "} gamma*=" + good.str() + "; ";
    }
  }
  return {ok, detail};
}

Verdict influence_sum() {
  std::size_t applicable = 0, violations = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const double density = 0.05 + 0.9 * static_cast<double>(s % 19) / 18;
    const auto f = builtin::random(12, density, 9000 + s);
    const auto c = influence_sum_check(f, 0.1, 1.0 / 16);
    applicable += c.applicable;
    violations += c.applicable && !c.holds;
  }
  return {violations == 0,
          "1000 functions, applicable " + std::to_string(applicable) + ", violations " + std::to_string(violations)};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

Verdict replay_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / ("coinflip_replay_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string cli = COINFLIP_CLI;
  const std::vector<std::string> commands = {
      R"(attack protocol --spec '{"kind":"builtin","name":"select-then-vote","players":8,"k":2}' --seed 7)",
      R"(attack family --random 20 --arity 10 --h 8 --seed 3)",
      R"(attack process --fn random:12:0.5:5 --h 8 --delta 0.1 --seed 4)",
      R"(attack multibit --spec '{"kind":"builtin","name":"xor-majority","players":4,"bits":2}' --seed 9)",
      R"(build --k 2 --players 4096 --seed 1 --simulate 2000)",
      R"(verify --spec '{"kind":"builtin","name":"transcript-fn","players":4,"k":2,"params":{"fn":"majority:8"}}' --b 1 --mode mc --trials 2000 --seed 3)",
  };
  std::size_t same = 0;
  std::string detail;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto json = dir / ("run" + std::to_string(c) + "_" + std::to_string(rep) + ".json");
      const auto text = dir / ("run" + std::to_string(c) + "_" + std::to_string(rep) + ".txt");
      const std::string line =
          cli + " " + commands[c] + " --out " + json.string() + " > " + text.string() + " 2>&1";
      const int status = std::system(line.c_str());
      outputs[rep] = std::to_string(status) + "\n" + slurp(json) + "\n" + slurp(text);
    }
    if (outputs[0] == outputs[1] && outputs[0].size() > 8) {
      ++same;
    } else {
      detail += "differs: " + commands[c] + "; ";
    }
  }
  std::filesystem::remove_all(dir);
  return {same == commands.size(),
          std::to_string(same) + "/" + std::to_string(commands.size()) + " commands byte-identical. " + detail};
}

}  // namespace

int main() {
  criterion(1, "restriction gain identity", 10, gain_identity);
  criterion(2, "semi-random process success", 120, process_success);
  criterion(3, "family common set coverage", 300, family_coverage);
  criterion(4, "two-round protocol biasing", 300, protocol_post_condition);
  criterion(5, "multi-bit wrapper", 60, multibit_wrapper);
  criterion(6, "greedy majority oracle match", 1, kkl_majority);
  criterion(7, "lightest bin bound", 60, lightest_bin_bound);
  criterion(8, "pipeline honesty", 60, pipeline_honesty);
  criterion(9, "leader reduction", 10, leader_reduction);
  criterion(10, "influence-sum inequality", 60, influence_sum);
  criterion(11, "replay determinism", 120, replay_determinism);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
