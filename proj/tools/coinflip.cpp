// coinflip: command-line front end for the library.
//
// Exit codes: 0 ok, 1 other failure, 2 usage or malformed input,
// 3 runtime assertion or post-condition failure (report still written),
// 4 capacity exceeded, 5 inconsistent pipeline schedule.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "coinflip/attack.hpp"
#include "coinflip/construct.hpp"
#include "coinflip/error.hpp"
#include "coinflip/registry.hpp"
#include "coinflip/report.hpp"

using namespace coinflip;

namespace {

struct ExitCode {
  int code;
};

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

// Summary rows go to stdout unless the JSON report already does.
std::ostream& summary(const std::string& out) { return out == "-" ? std::cerr : std::cout; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct AttackFlags {
  AttackParams params;
  std::string mode = "desk";
  std::string out = "-";
  int outcome = 1;
};

void add_attack_flags(CLI::App* cmd, AttackFlags& f) {
  cmd->set_help_flag("--help", "print help and exit");
  cmd->add_option("--gamma", f.params.gamma, "target bias: force the outcome with probability >= 1 - gamma");
  cmd->add_option("--h", f.params.h, "heavy-set budget");
  cmd->add_option("--c", f.params.c, "chisel floor");
  cmd->add_option("--r", f.params.r, "process step budget (0: formula)");
  cmd->add_option("--delta", f.params.delta, "process failure probability");
  cmd->add_option("--seed", f.params.seed, "random seed");
  cmd->add_option("--mode", f.mode, "parameter mode")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--candidates", f.params.candidates, "ordered random sets tried by the family search");
  cmd->add_option("--boost-target", f.params.boost_target, "target of the recursive re-boosts");
  cmd->add_option("--budget", f.params.budget, "exact-evaluation bit budget");
  cmd->add_option("--out", f.out, "JSON report path, - for stdout");
}

void finish_params(AttackFlags& f) { f.params.mode = f.mode == "paper" ? ParamMode::paper : ParamMode::desk; }

// Independent recomputation of Pr[f|_B = o] for a function-level coalition.
Dyadic function_value(const BooleanFunction& f, const CoordSet& b, int o) {
  if (static_cast<int>(b.size()) == f.arity()) return Dyadic::one();
  return prob(restrict_optimal(f, b, o), o);
}

void print_values(std::ostream& os, const AttackReport& r) {
  os << "claimed_value=" << (r.claimed_value ? fmt(*r.claimed_value) : "none")
     << " verified_value=" << r.verified_value.str() << " (" << fmt(r.verified_value.to_double()) << ")"
     << " |B|=" << r.b.size() << " success=" << (r.success ? "yes" : "no") << "\n";
}

int emit_attack(const AttackReport& r, const AttackFlags& f, std::size_t players, int rounds) {
  write_text(f.out, to_json(r).dump(2) + "\n");
  std::ostream& os = summary(f.out);
  print_values(os, r);
  CsvRow row = csv_row(r, players, rounds);
  row.outcome = std::to_string(f.outcome);
  os << csv_header() << "\n" << csv_line(row) << "\n";
  return r.success ? 0 : 3;
}

// Writes the failure report for an assertion raised mid-run, then exits 3.
[[noreturn]] void assertion_report(const std::string& command, const std::string& out, const AssertionFailure& e) {
  Json j{{"command", command}, {"error", e.what()}};
  try {
    j["trace"] = Json::parse(e.trace());
  } catch (const Json::exception&) {
    j["trace"] = e.trace();
  }
  write_text(out, j.dump(2) + "\n");
  std::cerr << "assertion failed: " << e.what() << "\n";
  throw ExitCode{3};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective coin-flipping lab: Boolean-function attacks, protocol biasing, pipeline construction"};
  // "--h" is the heavy-set budget, so help is long-form only.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  std::function<int()> run;

  // influence
  std::string infl_fn;
  int infl_outcome = 1;
  auto* influence_cmd = app.add_subcommand("influence", "per-coordinate influences of a builtin function");
  influence_cmd->add_option("fn", infl_fn, "function id, e.g. majority:3")->required();
  influence_cmd->add_option("--outcome", infl_outcome, "outcome for the prob line")->check(CLI::Range(0, 1));
  influence_cmd->callback([&] {
    run = [&] {
      const BooleanFunction f = make_builtin(infl_fn);
      std::cout << "# fn=" << infl_fn << " arity=" << f.arity() << " prob" << infl_outcome << "="
                << prob(f, infl_outcome).str() << "\n";
      std::cout << "coord,influence,value\n";
      const auto infl = influences(f);
      for (int i = 1; i <= f.arity(); ++i)
        std::cout << i << "," << infl[i - 1].str() << "," << fmt(infl[i - 1].to_double()) << "\n";
      return 0;
    };
  });

  // attack
  auto* attack_cmd = app.add_subcommand("attack", "biasing attacks");
  attack_cmd->require_subcommand(1);

  AttackFlags kkl_flags;
  std::string kkl_fn;
  auto* kkl_cmd = attack_cmd->add_subcommand("kkl", "greedy most-influential-coordinate attack on a function");
  kkl_cmd->add_option("--fn", kkl_fn, "function id")->required();
  kkl_cmd->add_option("--outcome", kkl_flags.outcome)->check(CLI::Range(0, 1));
  add_attack_flags(kkl_cmd, kkl_flags);
  kkl_cmd->callback([&] {
    run = [&] {
      finish_params(kkl_flags);
      const BooleanFunction f = make_builtin(kkl_fn);
      AttackReport r;
      r.command = "kkl";
      r.target = kkl_fn;
      r.gamma = kkl_flags.params.gamma;
      r.params = kkl_flags.params;
      r.greedy = kkl_greedy(f, kkl_flags.outcome, r.gamma);
      r.b = r.greedy->b;
      r.claimed_value = r.greedy->final_prob.to_double();
      r.verified_value = function_value(f, r.b, kkl_flags.outcome);
      r.success = r.verified_value.at_least(1 - r.gamma);
      return emit_attack(r, kkl_flags, f.arity(), 1);
    };
  });

  AttackFlags proc_flags;
  std::string proc_fn;
  auto* proc_cmd = attack_cmd->add_subcommand("process", "semi-random process on a function");
  proc_cmd->add_option("--fn", proc_fn, "function id")->required();
  proc_cmd->add_option("--outcome", proc_flags.outcome)->check(CLI::Range(0, 1));
  add_attack_flags(proc_cmd, proc_flags);
  proc_cmd->callback([&] {
    run = [&] {
      finish_params(proc_flags);
      const BooleanFunction f = make_builtin(proc_fn);
      Rng rng(proc_flags.params.seed);
      AttackReport r;
      r.command = "process";
      r.target = proc_fn;
      r.gamma = proc_flags.params.gamma;
      r.params = proc_flags.params;
      try {
        r.process = semi_random_process(f, proc_flags.outcome, proc_flags.params, rng);
      } catch (const AssertionFailure& e) {
        assertion_report("process", proc_flags.out, e);
      }
      r.b_r = r.process->b_r;
      r.b_h = r.process->b_h;
      r.b = r.b_r.united(r.b_h);
      r.claimed_value = r.process->final_prob.to_double();
      r.verified_value = function_value(f, r.b, proc_flags.outcome);
      r.success = r.process->success && r.verified_value.at_least(1 - r.gamma);
      return emit_attack(r, proc_flags, f.arity(), 1);
    };
  });

  AttackFlags fam_flags;
  std::vector<std::string> fam_fns;
  int fam_random = 0, fam_arity = 12;
  double fam_density = 0.5;
  auto* fam_cmd = attack_cmd->add_subcommand("family", "common random set for a family of functions");
  fam_cmd->add_option("--fn", fam_fns, "member function id (repeatable)");
  fam_cmd->add_option("--random", fam_random, "add this many random members");
  fam_cmd->add_option("--arity", fam_arity, "arity of random members");
  fam_cmd->add_option("--density", fam_density, "density of random members");
  add_attack_flags(fam_cmd, fam_flags);
  fam_cmd->callback([&] {
    run = [&] {
      finish_params(fam_flags);
      std::vector<FamilyMember> family;
      std::vector<std::string> ids = fam_fns;
      for (int i = 0; i < fam_random; ++i)
        ids.push_back("random:" + std::to_string(fam_arity) + ":" + fmt(fam_density) + ":" +
                      std::to_string(Rng::derive(fam_flags.params.seed, 1000000 + i)));
      if (ids.empty()) throw InvalidArgument("family needs --fn or --random members");
      for (const auto& id : ids) family.push_back({make_builtin(id), 1});
      FamilyResult res;
      try {
        res = family_common_set(family, fam_flags.params);
      } catch (const AssertionFailure& e) {
        assertion_report("family", fam_flags.out, e);
      }
      Json j{{"command", "family"}, {"params", to_json(fam_flags.params)}, {"members", ids},
             {"family", to_json(res)}};
      write_text(fam_flags.out, j.dump(2) + "\n");
      summary(fam_flags.out) << "coverage=" << fmt(res.coverage) << " covered=" << res.covered << "/"
                             << family.size() << " |B_R|=" << res.b_r.size()
                             << " verified=" << (res.verified ? "yes" : "no") << "\n";
      return res.verified ? 0 : 3;
    };
  });

  AttackFlags proto_flags[2];
  std::string proto_spec[2];
  for (int which = 0; which < 2; ++which) {
    const bool multibit = which == 1;
    const char* name = multibit ? "multibit" : "protocol";
    AttackFlags& flags = proto_flags[which];
    std::string& spec = proto_spec[which];
    auto* cmd = attack_cmd->add_subcommand(name, multibit ? "bias a protocol with multi-bit messages"
                                                          : "bias a k-round protocol with one bit per player per round");
    cmd->add_option("--spec", spec, "protocol spec JSON path, or inline JSON")->required();
    add_attack_flags(cmd, flags);
    cmd->callback([&run, &flags, &spec, multibit, name] {
      run = [&flags, &spec, multibit, name] {
        finish_params(flags);
        const ProtocolSpec p = protocol_from_json(read_protocol_json(spec));
        AttackReport r;
        try {
          r = multibit ? bias_protocol_multibit(p, flags.params) : bias_protocol(p, flags.params);
        } catch (const AssertionFailure& e) {
          assertion_report(name, flags.out, e);
        }
        return emit_attack(r, flags, p.players, p.rounds());
      };
    });
  }

  // build
  int build_k = 2;
  std::size_t build_players = 0;
  std::uint64_t build_seed = 0, build_sim = 0;
  std::string build_resilient = "recmaj3", build_stages, build_out = "-", build_dump;
  double build_gamma = 0;
  auto* build_cmd = app.add_subcommand("build", "k-round lightest-bin pipeline protocol");
  build_cmd->add_option("--k", build_k, "rounds")->check(CLI::PositiveNumber);
  build_cmd->add_option("--players", build_players, "number of players")->required();
  build_cmd->add_option("--seed", build_seed, "random seed");
  build_cmd->add_option("--simulate", build_sim, "honest Monte Carlo trials");
  build_cmd->add_option("--resilient", build_resilient, "recmaj3, majority, parity or tribes:<width>");
  build_cmd->add_option("--stages", build_stages, "explicit stages op:t:beta[:delta],... instead of the schedule");
  build_cmd->add_option("--gamma", build_gamma, "recorded in the config");
  build_cmd->add_option("--out", build_out, "spec JSON path, - for stdout");
  build_cmd->add_option("--dump-assemblies", build_dump, "write the assemblies of one seeded honest run");
  build_cmd->callback([&] {
    run = [&] {
      const ResilientChoice choice = ResilientChoice::parse(build_resilient);
      PipelineConfig cfg;
      std::vector<std::string> warnings;
      if (build_stages.empty()) {
        Schedule s = paper_schedule(build_players, build_k, build_gamma, choice);
        cfg = s.config;
        warnings = s.warnings;
      } else {
        cfg.stages = parse_stages(build_stages);
        cfg.resilient = choice;
        cfg.gamma = build_gamma;
        if (cfg.rounds() != build_k)
          throw ScheduleError(std::to_string(cfg.stages.size()) + " stages give " + std::to_string(cfg.rounds()) +
                              " rounds, --k is " + std::to_string(build_k));
      }
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      const Pipeline plan = plan_pipeline(cfg, build_players);
      const ProtocolSpec p = pipeline_protocol(plan);

      Json spec = pipeline_json(cfg, build_players);
      spec["seed"] = build_seed;
      spec["warnings"] = warnings;
      Json shapes = Json::array();
      for (const auto& s : plan.shapes)
        shapes.push_back({{"n_before", s.n_before}, {"s_before", s.s_before}, {"n", s.n}, {"s", s.s},
                          {"n_after", s.n_after}});
      spec["shapes"] = shapes;
      spec["resilient_arity"] = plan.fn.arity;
      spec["imbalance"] = plan.fn.imbalance();

      std::optional<CsvRow> row;
      if (build_sim > 0) {
        const auto mc = monte_carlo_value(p, honest_strategy(), Outcome{1}, build_sim, build_seed);
        const double bias = std::abs(mc.estimate - 0.5);
        spec["simulation"] = {{"trials", mc.trials},    {"hits", mc.hits},
                              {"estimate", mc.estimate}, {"ci_halfwidth", mc.ci_halfwidth},
                              {"bias", bias},            {"within", bias <= plan.fn.imbalance() + mc.ci_halfwidth}};
        row = CsvRow{p.name, p.players, p.rounds(), {}, "1", mc.hits, mc.trials, "mc", mc.trials, build_seed,
                     mc.ci_halfwidth};
      }
      write_text(build_out, spec.dump(2) + "\n");
      if (row) summary(build_out) << csv_header() << "\n" << csv_line(*row) << "\n";

      if (!build_dump.empty()) {
        Rng rng(build_seed);
        Transcript t = p.blank_transcript();
        for (int r = 1; r <= p.rounds(); ++r) t.fill_random(r, rng);
        const PipelineTrace trace = trace_pipeline(plan, t);
        Json dump{{"seed", build_seed}, {"assemblies", Json::array()}, {"selections", Json::array()}};
        for (const auto& a : trace.assemblies) dump["assemblies"].push_back(to_json(a));
        for (const auto& s : trace.selections) dump["selections"].push_back(to_json(s));
        dump["final_bits"] = trace.final_bits;
        dump["output"] = trace.output;
        write_text(build_dump, dump.dump(2) + "\n");
      }
      return 0;
    };
  });

  // verify
  std::string verify_spec, verify_mode = "exact", verify_out;
  int verify_b = 1;
  double verify_gamma = 0.25;
  ResilienceOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "(b, gamma)-resilience check");
  verify_cmd->add_option("--spec", verify_spec, "protocol spec JSON path, or inline JSON")->required();
  verify_cmd->add_option("--b", verify_b, "coalition size")->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--gamma", verify_gamma, "resilience parameter");
  verify_cmd->add_option("--mode", verify_mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  verify_cmd->add_option("--trials", verify_opts.trials, "Monte Carlo trials per coalition");
  verify_cmd->add_option("--seed", verify_opts.seed, "random seed");
  verify_cmd->add_option("--max-coalitions", verify_opts.max_coalitions, "cap on enumerated coalitions");
  verify_cmd->add_option("--budget", verify_opts.budget, "exact-evaluation bit budget");
  verify_cmd->add_option("--out", verify_out, "optional JSON report path, - for stdout");
  verify_cmd->callback([&] {
    run = [&] {
      const ProtocolSpec p = protocol_from_json(read_protocol_json(verify_spec));
      verify_opts.mode = verify_mode == "exact" ? EvalMode::exact : EvalMode::monte_carlo;
      const ResilienceReport rep = resilience_check(p, verify_b, verify_gamma, verify_opts);
      if (!verify_out.empty()) {
        Json j = to_json(rep);
        j["protocol"] = p.name;
        j["b"] = verify_b;
        j["gamma"] = verify_gamma;
        j["seed"] = verify_opts.seed;
        write_text(verify_out, j.dump(2) + "\n");
      }
      CsvRow row;
      row.protocol = p.name;
      row.players = p.players;
      row.rounds = p.rounds();
      row.coalition = rep.worst_coalition;
      row.outcome = p.domain == Domain::leader ? "bad-leader" : std::to_string(rep.worst_outcome);
      row.seed = verify_opts.seed;
      if (rep.exact_value) {
        row.value_num = static_cast<std::uint64_t>(rep.exact_value->numerator());
        row.value_den = rep.exact_value->denominator();
        row.mode = "exact";
      } else {
        row.trials = verify_opts.trials;
        row.value_num = static_cast<std::uint64_t>(std::llround(rep.value * static_cast<double>(verify_opts.trials)));
        row.value_den = verify_opts.trials;
        row.mode = "mc";
        row.ci_halfwidth = rep.ci_halfwidth;
      }
      std::ostream& os = summary(verify_out);
      os << csv_header() << "\n" << csv_line(row) << "\n";
      std::cerr << "resilient=" << (rep.resilient ? "yes" : "no") << " coalitions_checked=" << rep.coalitions_checked
                << "\n";
      return 0;
    };
  });

  // probe
  AttackFlags probe_flags;
  double probe_fraction = 0.5;
  auto* probe_cmd = app.add_subcommand("probe", "run the protocol attack over the built-in probe corpus");
  probe_cmd->add_option("--fraction", probe_fraction, "coalition budget as a fraction of the players");
  add_attack_flags(probe_cmd, probe_flags);
  probe_cmd->callback([&] {
    run = [&] {
      finish_params(probe_flags);
      std::vector<ProtocolSpec> corpus;
      for (const Json& j : probe_corpus()) corpus.push_back(protocol_from_json(j));
      const auto rows = round_lb_probe(corpus, probe_fraction, probe_flags.params);
      std::ostringstream os;
      os << "protocol,l,k,coalition,fraction,value_num,value_den,within_budget,mode,seed,error\n";
      for (const auto& r : rows)
        os << r.protocol << "," << r.players << "," << r.rounds << "," << r.coalition << "," << fmt(r.fraction)
           << "," << r.value.numerator() << "," << r.value.denominator() << "," << (r.within_budget ? 1 : 0)
           << ",exact," << probe_flags.params.seed << ",\"" << r.error << "\"\n";
      write_text(probe_flags.out, os.str());
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return run ? run() : 2;
  } catch (const ExitCode& e) {
    return e.code;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failed: " << e.what() << "\n";
    return 3;
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return 4;
  } catch (const ScheduleError& e) {
    std::cerr << "schedule: " << e.what() << "\n";
    return 5;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotEnoughMass& e) {
    std::cerr << "not enough mass: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
