#include "exclique/trace.hpp"

#include <nlohmann/json.hpp>

#include <istream>
#include <ostream>

namespace exclique {

namespace {

const char* kind_name(TraceRec::Kind k) {
    switch (k) {
        case TraceRec::Kind::RunHeader: return "run";
        case TraceRec::Kind::Genesis: return "genesis";
        case TraceRec::Kind::Inject: return "inject";
        case TraceRec::Kind::Produce: return "produce";
        case TraceRec::Kind::BcastDone: return "bcast";
        case TraceRec::Kind::ExtraRound: return "round";
        case TraceRec::Kind::Fault: return "fault";
        case TraceRec::Kind::InTurnBlocked: return "blocked";
        case TraceRec::Kind::DeadlockTie: return "tie";
        case TraceRec::Kind::Reorg: return "reorg";
        case TraceRec::Kind::Reject: return "reject";
        case TraceRec::Kind::Orphan: return "orphan";
        case TraceRec::Kind::Undeliverable: return "undeliverable";
        case TraceRec::Kind::BetaClamped: return "beta_clamp";
        case TraceRec::Kind::CbfRebuild: return "cbf_rebuild";
        case TraceRec::Kind::Final: return "final";
    }
    return "?";
}

TraceRec::Kind kind_from(const std::string& s) {
    static const std::pair<const char*, TraceRec::Kind> table[] = {
        {"run", TraceRec::Kind::RunHeader},     {"genesis", TraceRec::Kind::Genesis},
        {"inject", TraceRec::Kind::Inject},     {"produce", TraceRec::Kind::Produce},
        {"bcast", TraceRec::Kind::BcastDone},   {"round", TraceRec::Kind::ExtraRound},
        {"fault", TraceRec::Kind::Fault},       {"blocked", TraceRec::Kind::InTurnBlocked},
        {"tie", TraceRec::Kind::DeadlockTie},   {"reorg", TraceRec::Kind::Reorg},
        {"reject", TraceRec::Kind::Reject},     {"orphan", TraceRec::Kind::Orphan},
        {"undeliverable", TraceRec::Kind::Undeliverable},
        {"beta_clamp", TraceRec::Kind::BetaClamped},
        {"cbf_rebuild", TraceRec::Kind::CbfRebuild},
        {"final", TraceRec::Kind::Final},
    };
    for (const auto& [name, k] : table)
        if (s == name) return k;
    throw MalformedTrace("unknown record kind '" + s + "'");
}

BlockKind block_kind_from(const std::string& s) {
    if (s == "InTurn") return BlockKind::InTurn;
    if (s == "NoTurn") return BlockKind::NoTurn;
    if (s == "Genesis") return BlockKind::Genesis;
    throw MalformedTrace("unknown block kind '" + s + "'");
}

} // namespace

std::string trace_to_ndjson_line(const TraceRec& r) {
    nlohmann::json j;
    j["ev"] = kind_name(r.kind);
    j["t"] = r.t;
    switch (r.kind) {
        case TraceRec::Kind::RunHeader:
            j["note"] = r.note;
            j["n"] = r.aux;
            break;
        case TraceRec::Kind::Genesis:
        case TraceRec::Kind::Final:
            j["id"] = r.id;
            j["step"] = r.step;
            break;
        case TraceRec::Kind::Inject:
            j["batch"] = r.step;
            j["txs"] = r.tx_count;
            break;
        case TraceRec::Kind::Produce:
            j["step"] = r.step;
            j["node"] = r.node;
            j["kind"] = to_string(r.block_kind);
            j["txs"] = r.tx_count;
            j["bytes"] = r.bytes;
            j["x"] = r.x_ms;
            j["v"] = r.v_ms;
            j["r"] = r.r_ms;
            j["a"] = r.a_ms;
            j["id"] = r.id;
            j["parent"] = r.id2;
            break;
        case TraceRec::Kind::BcastDone:
            j["id"] = r.id;
            j["step"] = r.step;
            j["b"] = r.b_ms;
            j["rounds"] = r.rounds;
            j["held_by"] = r.aux;
            break;
        case TraceRec::Kind::ExtraRound:
            j["node"] = r.node;
            j["step"] = r.step;
            j["missing"] = r.aux;
            j["id"] = r.id;
            break;
        default:
            j["node"] = r.node;
            j["step"] = r.step;
            if (r.aux) j["aux"] = r.aux;
            if (!r.note.empty()) j["note"] = r.note;
            if (!r.id.empty()) j["id"] = r.id;
            break;
    }
    return j.dump();
}

void write_ndjson(std::ostream& os, const std::vector<TraceRec>& recs) {
    for (const auto& r : recs) os << trace_to_ndjson_line(r) << '\n';
}

std::vector<TraceRec> parse_ndjson(std::istream& is) {
    std::vector<TraceRec> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedTrace("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("ev")) throw MalformedTrace("line " + std::to_string(lineno) + ": no 'ev'");
        TraceRec r;
        r.kind = kind_from(j["ev"].get<std::string>());
        r.t = j.value("t", 0.0);
        switch (r.kind) {
            case TraceRec::Kind::Produce:
                r.step = j.at("step").get<uint64_t>();
                r.node = j.at("node").get<uint32_t>();
                r.block_kind = block_kind_from(j.at("kind").get<std::string>());
                r.tx_count = j.at("txs").get<uint32_t>();
                r.bytes = j.at("bytes").get<uint64_t>();
                r.x_ms = j.value("x", 0.0);
                r.v_ms = j.value("v", 0.0);
                r.r_ms = j.value("r", 0.0);
                r.a_ms = j.value("a", 0.0);
                r.id = j.at("id").get<std::string>();
                r.id2 = j.at("parent").get<std::string>();
                break;
            case TraceRec::Kind::BcastDone:
                r.id = j.at("id").get<std::string>();
                r.step = j.value("step", uint64_t{0});
                r.b_ms = j.value("b", 0.0);
                r.rounds = j.value("rounds", 0u);
                break;
            case TraceRec::Kind::Genesis:
            case TraceRec::Kind::Final:
                r.id = j.at("id").get<std::string>();
                r.step = j.value("step", uint64_t{0});
                break;
            default:
                r.step = j.value("step", uint64_t{0});
                r.node = j.value("node", 0u);
                r.aux = j.value("aux", 0u);
                break;
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace exclique
