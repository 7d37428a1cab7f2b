#include "coinflip/report.hpp"

#include <cstdio>

namespace coinflip {

Json to_json(const Dyadic& d) {
  return Json{{"num", d.numerator()}, {"den", d.denominator()}, {"value", d.to_double()}};
}

Json to_json(const CoordSet& s) { return Json(s.members()); }

Json to_json(const BitCoalition& b) {
  Json out = Json::array();
  for (const auto& round : b.positions) out.push_back(round);
  return out;
}

Json to_json(const ProcessTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"coord", s.coord},
                     {"case", to_string(s.tag)},
                     {"x", s.influence.str()},
                     {"z", s.z.str()},
                     {"prob", s.prob.str()}});
  return Json{{"initial_prob", t.initial_prob.str()}, {"steps", steps}};
}

Json to_json(const ProcessResult& r) {
  return Json{{"b_r", to_json(r.b_r)},
              {"b_h", to_json(r.b_h)},
              {"success", r.success},
              {"final_prob", r.final_prob.str()},
              {"trace", to_json(r.trace)}};
}

Json to_json(const GreedyResult& r) {
  return Json{{"b", to_json(r.b)}, {"final_prob", r.final_prob.str()}, {"trace", to_json(r.trace)}};
}

Json to_json(const FamilyResult& r) {
  Json members = Json::array();
  for (const auto& bh : r.b_h) members.push_back(bh ? to_json(*bh) : Json(nullptr));
  return Json{{"b_r", to_json(r.b_r)},  {"order", r.order},          {"r", r.r},
              {"candidate", r.candidate}, {"covered", r.covered},    {"coverage", r.coverage},
              {"verified", r.verified},   {"b_h", members}};
}

Json to_json(const LevelTrace& t) {
  Json chisel = Json::array();
  for (const auto& it : t.chisel)
    chisel.push_back({{"slot", it.slot},
                      {"size_before", it.size_before},
                      {"size_after", it.size_after},
                      {"attempts", it.attempts},
                      {"mass_kept", it.mass_kept.str()},
                      {"mass_boosted", it.mass_boosted.str()},
                      {"b_i_bits", it.b_i_bits}});
  Json c_sets = Json::array();
  for (const auto& c : t.c_sets) c_sets.push_back(to_json(c));
  Json nested = Json::array();
  for (const auto& n : t.nested) nested.push_back(to_json(n));
  return Json{{"rounds", t.rounds},
              {"gamma", t.gamma},
              {"prefixes", t.prefixes},
              {"family_size", t.family_size},
              {"family_mass", t.family_mass.str()},
              {"covered_mass", t.covered_mass.str()},
              {"family", to_json(t.family)},
              {"mass_after_first_boost", t.mass_after_first_boost.str()},
              {"chisel", chisel},
              {"c_sets", c_sets},
              {"mass_after_final_boost", t.mass_after_final_boost.str()},
              {"b_r", to_json(t.b_r)},
              {"b_h", to_json(t.b_h)},
              {"nested", nested}};
}

Json to_json(const AttackParams& p) {
  return Json{{"mode", p.mode == ParamMode::desk ? "desk" : "paper"},
              {"gamma", p.gamma},
              {"h", p.h},
              {"c", p.c},
              {"r", p.r},
              {"delta", p.delta},
              {"boost_target", p.boost_target},
              {"candidates", p.candidates},
              {"seed", p.seed},
              {"budget", p.budget}};
}

Json to_json(const AttackReport& r) {
  Json out{{"command", r.command},
           {"target", r.target},
           {"gamma", r.gamma},
           {"params", to_json(r.params)},
           {"b_r", to_json(r.b_r)},
           {"b_h", to_json(r.b_h)},
           {"b_i", to_json(r.b_i)},
           {"b", to_json(r.b)},
           {"size", r.b.size()},
           {"bits", to_json(r.bits)},
           {"bit_count", r.bit_count}};
  out["claimed_value"] = r.claimed_value ? Json(*r.claimed_value) : Json(nullptr);
  out["bit_level_value"] = r.bit_level_value ? to_json(*r.bit_level_value) : Json(nullptr);
  out["verified_value"] = to_json(r.verified_value);
  out["success"] = r.success;
  out["budget_bound"] = r.budget_bound;
  if (r.greedy) out["greedy"] = to_json(*r.greedy);
  if (r.process) out["process"] = to_json(*r.process);
  if (r.family) out["family"] = to_json(*r.family);
  if (r.level) out["level"] = to_json(*r.level);
  return out;
}

Json to_json(const ResilienceReport& r) {
  Json out{{"resilient", r.resilient},
           {"mode", r.mode == EvalMode::exact ? "exact" : "mc"},
           {"worst_coalition", to_json(r.worst_coalition)},
           {"worst_outcome", r.worst_outcome},
           {"value", r.value}};
  out["exact_value"] = r.exact_value ? to_json(*r.exact_value) : Json(nullptr);
  out["ci_halfwidth"] = r.ci_halfwidth;
  out["coalitions_checked"] = r.coalitions_checked;
  return out;
}

Json to_json(const Assembly& a) {
  std::vector<int> bad;
  for (std::size_t p = 1; p < a.bad.size(); ++p)
    if (a.bad[p]) bad.push_back(static_cast<int>(p));
  std::vector<std::size_t> flagged;
  for (std::size_t j = 0; j < a.flagged.size(); ++j)
    if (a.flagged[j]) flagged.push_back(j + 1);
  return Json{{"universe", a.universe}, {"n", a.n()},          {"s", a.s()},
              {"bad_sets", a.bad_set_count()}, {"declared_b", a.declared_b}, {"bad_players", bad},
              {"flagged_sets", flagged}, {"sets", a.sets}};
}

Json to_json(const StageConfig& s) {
  return Json{{"op", s.op == TransformKind::grouping ? "group" : "split"},
              {"t", s.t},
              {"beta", s.beta},
              {"delta", s.delta}};
}

Json to_json(const PipelineConfig& c) {
  Json stages = Json::array();
  for (const auto& s : c.stages) stages.push_back(to_json(s));
  return Json{{"stages", stages}, {"resilient", c.resilient.str()}, {"gamma", c.gamma}};
}

Json to_json(const LightestBinResult& r) {
  return Json{{"chosen", r.chosen},        {"voted_sets", r.voted_sets}, {"padded", r.padded},
              {"histogram", r.histogram}, {"good_histogram", r.good_histogram},
              {"rerolls", r.rerolls},     {"uniform_encoding", r.uniform_encoding}};
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string csv_header() {
  return "protocol,l,k,coalition,outcome,value_num,value_den,mode,trials,seed,ci_halfwidth";
}

std::string csv_line(const CsvRow& row) {
  std::string ci;
  if (row.ci_halfwidth) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *row.ci_halfwidth);
    ci = buf;
  }
  return quoted(row.protocol) + "," + std::to_string(row.players) + "," + std::to_string(row.rounds) + "," +
         quoted(row.coalition.str()) + "," + quoted(row.outcome) + "," + std::to_string(row.value_num) + "," +
         std::to_string(row.value_den) + "," + row.mode + "," + std::to_string(row.trials) + "," +
         std::to_string(row.seed) + "," + ci;
}

CsvRow csv_row(const AttackReport& r, std::size_t players, int rounds) {
  CsvRow row;
  row.protocol = r.target;
  row.players = players;
  row.rounds = rounds;
  row.coalition = r.b;
  row.outcome = "1";
  row.value_num = static_cast<std::uint64_t>(r.verified_value.numerator());
  row.value_den = r.verified_value.denominator();
  row.mode = "exact";
  row.seed = r.params.seed;
  return row;
}

}  // namespace coinflip
