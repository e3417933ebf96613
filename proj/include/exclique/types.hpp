#pragma once

#include <cstdint>

#include "exclique/hash.hpp"

namespace exclique {

using NodeId = uint32_t;
using Step = uint64_t;
using TimeMs = double; // simulated milliseconds

using TxId = Hash256;
using BlockId = Hash256;

// Minimum wire size of a token-transfer transaction; also the lower bound
// enforced on payload_size.
inline constexpr uint32_t kMinTxPayload = 110;

// Serialized transaction: id(32) nonce(8) fee(8) payload_size(4), zero-padded
// to payload_size bytes. On the wire each transaction is length-prefixed.
inline constexpr uint32_t kTxFixedFields = 32 + 8 + 8 + 4;
inline constexpr uint32_t kTxLenPrefix = 4;

struct Transaction {
    TxId id;
    uint32_t payload_size = kMinTxPayload; // total serialized bytes, >= 110
    uint64_t nonce = 0;
    uint64_t fee = 0;

    uint32_t wire_size() const { return kTxLenPrefix + payload_size; }

    bool operator==(const Transaction&) const = default;
};

} // namespace exclique
