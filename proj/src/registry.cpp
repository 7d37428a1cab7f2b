#include "coinflip/registry.hpp"

#include <fstream>
#include <sstream>

#include "coinflip/construct.hpp"
#include "coinflip/error.hpp"

namespace coinflip {

namespace {

const Json& params_of(const Json& spec) {
  static const Json empty = Json::object();
  const auto it = spec.find("params");
  return it == spec.end() ? empty : *it;
}

std::vector<int> bits_of(const Json& spec, int k) {
  if (!spec.contains("bits")) return std::vector<int>(k, 1);
  const Json& b = spec["bits"];
  if (b.is_number_integer()) return std::vector<int>(k, b.get<int>());
  auto v = b.get<std::vector<int>>();
  if (static_cast<int>(v.size()) != k) throw InvalidArgument("'bits' has " + std::to_string(v.size()) + " entries, k = " + std::to_string(k));
  return v;
}

ProtocolSpec shell(const Json& spec, const std::string& name) {
  ProtocolSpec p;
  p.name = spec.value("label", name);
  p.players = spec.at("players").get<std::size_t>();
  const int k = spec.value("k", 1);
  if (k < 1) throw InvalidArgument("k must be >= 1");
  p.bits = bits_of(spec, k);
  return p;
}

BooleanFunction fn_param(const Json& params, std::size_t arity, const std::string& who) {
  const BooleanFunction f = make_builtin(params.at("fn").get<std::string>());
  if (static_cast<std::size_t>(f.arity()) != arity)
    throw InvalidArgument(who + ": fn has arity " + std::to_string(f.arity()) + ", expected " + std::to_string(arity));
  return f;
}

bool strict_majority(const Transcript& t, int round, std::size_t first, std::size_t last) {
  std::size_t ones = 0;
  for (std::size_t q = first; q <= last; ++q) ones += t.bit(round, (q - 1) * t.bits(round));
  return 2 * ones > last - first + 1;
}

ProtocolSpec builtin_protocol(const Json& spec, const std::string& name) {
  const Json& params = params_of(spec);
  ProtocolSpec p = shell(spec, name);
  const int k = p.rounds();

  if (name == "one-round-fn") {
    if (k != 1) throw InvalidArgument(name + " has exactly one round");
    const BooleanFunction f = fn_param(params, p.players * p.bits[0], name);
    p.evaluate = [f](const Transcript& t) -> Outcome { return f(t.index(1)) ? 1 : 0; };
  } else if (name == "transcript-fn") {
    const BooleanFunction f = fn_param(params, p.total_bits(), name);
    p.evaluate = [f, k](const Transcript& t) -> Outcome { return f(t.index(k)) ? 1 : 0; };
  } else if (name == "last-round-fn") {
    const BooleanFunction f = fn_param(params, p.players * p.bits.back(), name);
    p.evaluate = [f, k](const Transcript& t) -> Outcome {
      std::uint64_t z = 0;
      for (std::size_t pos = 0; pos < t.round_size(k); ++pos) z |= std::uint64_t{t.bit(k, pos)} << pos;
      return f(z) ? 1 : 0;
    };
  } else if (name == "select-then-vote") {
    if (k != 2 || p.players % 2 != 0 || p.players < 2)
      throw InvalidArgument(name + " needs k = 2 and an even number of players");
    const std::size_t l = p.players;
    p.evaluate = [l](const Transcript& t) -> Outcome {
      const bool upper = strict_majority(t, 1, 1, l);
      return strict_majority(t, 2, upper ? l / 2 + 1 : 1, upper ? l : l / 2) ? 1 : 0;
    };
  } else if (name == "first-bit") {
    p.evaluate = [](const Transcript& t) -> Outcome { return t.bit(1, 0) ? 1 : 0; };
  } else if (name == "constant") {
    const Outcome v = params.value("value", 0U);
    if (v > 1) throw InvalidArgument("constant value must be 0 or 1");
    p.evaluate = [v](const Transcript&) { return v; };
  } else if (name == "xor-majority") {
    if (k != 1) throw InvalidArgument(name + " has exactly one round");
    p.evaluate = [](const Transcript& t) -> Outcome {
      std::size_t ones = 0;
      for (std::size_t q = 1; q <= t.players(); ++q) ones += __builtin_parityll(t.message(1, q));
      return 2 * ones > t.players() ? 1 : 0;
    };
  } else if (name == "leader-mod") {
    p.domain = Domain::leader;
    const std::size_t l = p.players;
    p.evaluate = [l, k](const Transcript& t) -> Outcome { return static_cast<Outcome>(t.index(k) % l) + 1; };
  } else if (name == "leader-fixed") {
    p.domain = Domain::leader;
    const Outcome leader = params.value("leader", 1U);
    if (leader < 1 || leader > p.players) throw InvalidArgument("leader-fixed: leader outside [1, players]");
    p.evaluate = [leader](const Transcript&) { return leader; };
  } else {
    throw InvalidArgument("unknown builtin protocol '" + name + "'");
  }
  if (p.total_bits() > 64 && (name == "transcript-fn" || name == "leader-mod"))
    throw InvalidArgument(name + " needs at most 64 transcript bits");
  return p;
}

PipelineConfig pipeline_config(const Json& spec) {
  const Json& params = params_of(spec);
  const std::size_t players = spec.at("players").get<std::size_t>();
  const int k = spec.value("k", 2);
  const ResilientChoice choice = ResilientChoice::parse(params.value("resilient", std::string("recmaj3")));
  const double gamma = params.value("gamma", 0.0);
  const Json stages = params.value("stages", Json("paper"));
  if (stages.is_string()) {
    if (stages.get<std::string>() != "paper") throw InvalidArgument("stages must be \"paper\" or a list");
    return paper_schedule(players, k, gamma, choice).config;
  }
  PipelineConfig cfg;
  cfg.resilient = choice;
  cfg.gamma = gamma;
  for (const Json& s : stages) {
    StageConfig st;
    const std::string op = s.at("op").get<std::string>();
    if (op == "group") {
      st.op = TransformKind::grouping;
    } else if (op == "split") {
      st.op = TransformKind::splitting;
    } else {
      throw InvalidArgument("stage op must be group or split, got '" + op + "'");
    }
    st.t = s.at("t").get<int>();
    st.beta = s.at("beta").get<int>();
    st.delta = s.value("delta", 0.0);
    cfg.stages.push_back(st);
  }
  if (cfg.rounds() != k)
    throw InvalidArgument("pipeline with " + std::to_string(cfg.stages.size()) + " stages has " +
                          std::to_string(cfg.rounds()) + " rounds, k = " + std::to_string(k));
  return cfg;
}

Json spec_of(const std::string& name, std::size_t players, int k, Json params = Json::object()) {
  Json j{{"kind", "builtin"}, {"name", name}, {"players", players}, {"k", k}};
  if (!params.empty()) j["params"] = std::move(params);
  return j;
}

}  // namespace

ProtocolSpec protocol_from_json(const Json& spec) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    const std::string name = spec.at("name").get<std::string>();
    ProtocolSpec p;
    if (kind == "builtin") {
      if (name == "leader-to-coin") return leader_to_coinflip(protocol_from_json(params_of(spec).at("inner")));
      p = builtin_protocol(spec, name);
    } else if (kind == "composed") {
      if (name != "lightest-bin-pipeline") throw InvalidArgument("unknown composed protocol '" + name + "'");
      p = build_pipeline(pipeline_config(spec), spec.at("players").get<std::size_t>());
      if (spec.contains("label")) p.name = spec["label"].get<std::string>();
    } else {
      throw InvalidArgument("unknown protocol kind '" + kind + "'");
    }
    p.validate();
    return p;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("protocol spec: ") + e.what());
  }
}

Json read_protocol_json(const std::string& text) {
  try {
    if (!text.empty() && text.front() == '{') return Json::parse(text);
    std::ifstream in(text);
    if (!in) throw InvalidArgument("cannot open protocol spec '" + text + "'");
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("protocol spec: ") + e.what());
  }
}

Json pipeline_json(const PipelineConfig& cfg, std::size_t players) {
  return Json{{"kind", "composed"},
              {"name", "lightest-bin-pipeline"},
              {"players", players},
              {"k", cfg.rounds()},
              {"params", to_json(cfg)}};
}

std::vector<Json> two_round_corpus() {
  std::vector<Json> out;
  out.push_back(spec_of("transcript-fn", 4, 2, {{"fn", "parity:8"}}));
  out.back()["label"] = "parity-l4";
  out.push_back(spec_of("transcript-fn", 6, 2, {{"fn", "parity:12"}}));
  out.back()["label"] = "parity-l6";
  out.push_back(spec_of("select-then-vote", 8, 2));
  out.back()["label"] = "select-then-vote-l8";
  PipelineConfig toy;
  toy.stages.push_back({TransformKind::grouping, 2, 2, 0});
  toy.resilient = ResilientChoice::parse("majority");
  out.push_back(pipeline_json(toy, 6));
  out.back()["label"] = "lightest-bin-toy-l6";
  out.push_back(spec_of("transcript-fn", 4, 2, {{"fn", "tribes:4x2"}}));
  out.back()["label"] = "tribes-l4";
  return out;
}

std::vector<Json> multibit_corpus() {
  std::vector<Json> out;
  out.push_back(spec_of("xor-majority", 4, 1));
  out.push_back(spec_of("one-round-fn", 4, 1, {{"fn", "parity:8"}}));
  out.push_back(spec_of("one-round-fn", 4, 1, {{"fn", "tribes:4x2"}}));
  out.push_back(spec_of("one-round-fn", 4, 1, {{"fn", "random:8:0.35:5"}}));
  out.push_back(spec_of("one-round-fn", 4, 1, {{"fn", "random:8:0.5:3"}}));
  const char* labels[] = {"xor-majority-r2", "parity-r2", "tribes-r2", "random-sparse-r2", "random-r2"};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i]["bits"] = 2;
    out[i]["label"] = labels[i];
  }
  return out;
}

std::vector<Json> probe_corpus() {
  std::vector<Json> out = two_round_corpus();
  out.push_back(spec_of("one-round-fn", 9, 1, {{"fn", "majority:9"}}));
  out.push_back(spec_of("last-round-fn", 5, 2, {{"fn", "majority:5"}}));
  out.push_back(spec_of("transcript-fn", 3, 3, {{"fn", "recmaj3:2"}}));
  return out;
}

}  // namespace coinflip
