#pragma once

#include <cstdint>
#include <string>

#include "coinflip/attack.hpp"
#include "coinflip/construct.hpp"
#include "coinflip/protocol.hpp"
#include "json.hpp"

namespace coinflip {

using Json = nlohmann::ordered_json;

Json to_json(const Dyadic& d);  // {"num", "den", "value"}
Json to_json(const CoordSet& s);
Json to_json(const BitCoalition& b);
Json to_json(const ProcessTrace& t);
Json to_json(const ProcessResult& r);
Json to_json(const GreedyResult& r);
Json to_json(const FamilyResult& r);
Json to_json(const LevelTrace& t);
Json to_json(const AttackParams& p);
Json to_json(const AttackReport& r);
Json to_json(const ResilienceReport& r);
Json to_json(const Assembly& a);  // sets, bad players, flagged sets, measured and declared b
Json to_json(const StageConfig& s);
Json to_json(const PipelineConfig& c);
Json to_json(const LightestBinResult& r);  // selection summary, not the output assembly

// One summary row. Columns: protocol, l, k, coalition, outcome, value_num,
// value_den, mode, trials, seed, ci_halfwidth. Exact rows have trials = 0
// and an empty CI; Monte Carlo rows report hits / trials.
struct CsvRow {
  std::string protocol;
  std::size_t players = 0;
  int rounds = 0;
  CoordSet coalition;
  std::string outcome;
  std::uint64_t value_num = 0;
  std::uint64_t value_den = 1;
  std::string mode;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::optional<double> ci_halfwidth;
};

std::string csv_header();
std::string csv_line(const CsvRow& row);

CsvRow csv_row(const AttackReport& r, std::size_t players, int rounds);

}  // namespace coinflip
