#pragma once

#include <string>
#include <vector>

#include "coinflip/protocol.hpp"
#include "coinflip/report.hpp"

namespace coinflip {

// Protocol spec JSON:
//   {"kind": "builtin" | "composed", "name": ..., "players": l, "k": rounds,
//    "bits": r or [r_1, ..., r_k], "params": {...}}
// "k" defaults to 1 and "bits" to 1 per round. Builtin names:
//   one-round-fn {fn}     1 round; fn (a boolfn builtin id) reads the whole round
//   transcript-fn {fn}    fn over every transcript bit, round 1 lowest
//   last-round-fn {fn}    fn over the last round only
//   select-then-vote      k = 2, l even: the strict majority of round 1 picks a
//                         half of the players, whose round-2 strict majority is output
//   first-bit             player 1's first bit of round 1
//   constant {value}
//   xor-majority          1 round: strict majority of the players' message parities
//   leader-mod            leader (index of the whole transcript mod l) + 1
//   leader-fixed {leader}
//   leader-to-coin {inner: spec}
// Composed: lightest-bin-pipeline {stages: [{op, t, beta, delta}] | "paper",
//   resilient, gamma}; "k" is the round count.
// Throws InvalidArgument on malformed specs.
ProtocolSpec protocol_from_json(const Json& spec);

// `text` is inline JSON when it starts with '{', otherwise a file path.
Json read_protocol_json(const std::string& text);

// The pipeline spec JSON for a config (composed kind).
Json pipeline_json(const PipelineConfig& cfg, std::size_t players);

// Five 2-round coin protocols at l in {4, 6, 8} used by the biasing tests.
std::vector<Json> two_round_corpus();

// 1-round protocols with 2 bits per player at l = 4.
std::vector<Json> multibit_corpus();

// Small protocols for the round-count probe.
std::vector<Json> probe_corpus();

}  // namespace coinflip
