#pragma once

#include <cstdint>
#include <string>

#include "exclique/types.hpp"

namespace exclique {

enum class OrderMode : uint8_t { Fixed, Differential };
enum class DelayMode : uint8_t { Naive, Accurate };
enum class PcbMode : uint8_t { FullBlock, Bcb, Pcb };

const char* to_string(OrderMode m);
const char* to_string(DelayMode m);
const char* to_string(PcbMode m);

// Affine per-task CPU cost models (ms). Broadcast time is emergent from the
// network model; these cover verification, pool reset and assembly.
struct CostModel {
    double v0 = 8.0, v1 = 0.012;
    double r0 = 2.0, r1 = 0.003;
    double a0 = 6.0, a1 = 0.015;

    double verify_ms(uint64_t m) const { return v0 + v1 * static_cast<double>(m); }
    double reset_ms(uint64_t m) const { return r0 + r1 * static_cast<double>(m); }
    double assemble_ms(uint64_t m) const { return a0 + a1 * static_cast<double>(m); }
    double vra_ms(uint64_t m) const { return verify_ms(m) + reset_ms(m) + assemble_ms(m); }
};

inline double default_delay_bound_ms(uint32_t n) { return (n / 2 + 1) * 500.0; }

struct ProtocolParams {
    uint32_t n = 21;                 // consensus node count
    double t_b = 3000.0;             // step duration, ms
    double w = default_delay_bound_ms(21); // no-turn delay upper bound, ms
    uint64_t m = 950;                // block capacity, transactions
    OrderMode order_mode = OrderMode::Fixed;
    DelayMode delay_mode = DelayMode::Naive;
    PcbMode pcb_mode = PcbMode::FullBlock;
    CostModel cost;
    double ewma_alpha = 0.2;         // per-signer beta estimator smoothing

    uint32_t recents_window() const { return n / 2; }
    uint32_t no_turn_count() const { return (n + 1) / 2 - 1; }
};

} // namespace exclique
