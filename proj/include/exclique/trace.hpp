#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "exclique/block.hpp"

namespace exclique {

// One newline-delimited-JSON record of the simulation trace. A single wide
// struct keeps the in-memory form trivially copyable; which fields are
// meaningful depends on the kind.
struct TraceRec {
    enum class Kind : uint8_t {
        RunHeader,     // seed, n, t_b, modes
        Genesis,       // id
        Inject,        // batch index, tx count
        Produce,       // block produced: step/node/kind/txs/bytes/x/v/r/a/id/parent
        BcastDone,     // block fully held everywhere: b_ms, rounds
        ExtraRound,    // missing-tx round: node, step, positions count
        Fault,         // scripted in-turn failure at step
        InTurnBlocked, // scheduled in-turn signer inside recents window
        DeadlockTie,   // equal-weight tips resolved by hash
        Reorg,         // node switched chains: depth
        Reject,        // verification rejected: reason code
        Orphan,        // parent unknown, buffered
        Undeliverable, // retransmission budget exhausted
        BetaClamped,   // accurate-delay beta >= w
        CbfRebuild,    // pool/filter desync repaired
        Final,         // head id, committed steps
    };

    Kind kind{};
    double t = 0;
    uint64_t step = 0;
    uint32_t node = 0;
    BlockKind block_kind = BlockKind::Genesis;
    uint32_t tx_count = 0;
    uint64_t bytes = 0;
    double x_ms = 0;
    double v_ms = 0;
    double r_ms = 0;
    double a_ms = 0;
    double b_ms = 0;
    uint32_t rounds = 0;
    uint32_t aux = 0;
    std::string id;
    std::string id2;
    std::string note;
};

std::string trace_to_ndjson_line(const TraceRec& rec);
void write_ndjson(std::ostream& os, const std::vector<TraceRec>& recs);

struct MalformedTrace : std::runtime_error {
    explicit MalformedTrace(const std::string& why) : std::runtime_error("malformed trace: " + why) {}
};

// Parses records written by write_ndjson; unknown kinds are an error.
std::vector<TraceRec> parse_ndjson(std::istream& is);

} // namespace exclique
