#include <doctest.h>

#include <memory>

#include "exclique/rewards.hpp"

using namespace exclique;

namespace {

Transaction fee_tx(uint64_t seed, uint64_t fee) {
    Transaction tx;
    tx.id = Hash256::from_seed(seed);
    tx.payload_size = 110;
    tx.fee = fee;
    return tx;
}

std::vector<BlockPtr> chain_of(const std::vector<std::tuple<NodeId, uint64_t, std::vector<UncleRef>>>& steps) {
    std::vector<BlockPtr> chain;
    auto genesis = std::make_shared<Block>(Block::genesis(0));
    chain.push_back(genesis);
    uint64_t seed = 1;
    for (size_t i = 0; i < steps.size(); ++i) {
        const auto& [signer, fee, uncles] = steps[i];
        auto b = std::make_shared<Block>();
        b->step = i + 1;
        b->parent_id = chain.back()->id();
        b->signer = signer;
        b->kind = BlockKind::InTurn;
        b->uncle_refs = uncles;
        if (fee > 0) b->txs.push_back(fee_tx(seed++, fee));
        b->seal();
        chain.push_back(std::move(b));
    }
    return chain;
}

} // namespace

TEST_CASE("single active generator receives the whole pot") {
    std::vector<RewardWindowEntry> window(5, RewardWindowEntry{0, {}});
    const auto res = distribute(window, 100, 0, 5);
    REQUIRE(res.active == std::vector<NodeId>{0});
    CHECK(res.payout_per_node == 100);
    CHECK(res.carry_after == 0);
}

TEST_CASE("uncle generators join the active set exactly once") {
    std::vector<RewardWindowEntry> window;
    for (NodeId g : {0u, 1u, 2u, 1u, 0u}) window.push_back(RewardWindowEntry{g, {}});
    window[2].uncles.push_back(UncleRef{3, 3}); // uncle by node 3 at step h-2
    const auto res = distribute(window, 100, 0, 5);
    CHECK(res.active == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(res.payout_per_node == 25);
    CHECK(res.carry_after == 0);
}

TEST_CASE("integer division leaves the remainder as carry") {
    std::vector<RewardWindowEntry> window{{0, {}}, {1, {}}, {2, {}}};
    auto res = distribute(window, 21, 0, 5);
    CHECK(res.payout_per_node == 7);
    CHECK(res.carry_after == 0);
    res = distribute(window, 22, 0, 5);
    CHECK(res.payout_per_node == 7);
    CHECK(res.carry_after == 1);
    // Carry joins the next pot.
    res = distribute(window, 20, 1, 5);
    CHECK(res.payout_per_node == 7);
    CHECK(res.carry_after == 0);
}

TEST_CASE("an empty window parks the fees in carry") {
    const auto res = distribute({}, 50, 3, 5);
    CHECK(res.active.empty());
    CHECK(res.payout_per_node == 0);
    CHECK(res.carry_after == 53);
}

TEST_CASE("conservation holds exactly over a run") {
    std::vector<std::tuple<NodeId, uint64_t, std::vector<UncleRef>>> steps;
    for (uint64_t h = 1; h <= 57; ++h)
        steps.emplace_back(static_cast<NodeId>(h % 5), 13 + (h * 7) % 11, std::vector<UncleRef>{});
    const auto chain = chain_of(steps);
    const auto out = compute_rewards(chain, 5);
    CHECK(out.conservation_ok());
    uint64_t direct_sum = 0;
    for (uint64_t u : out.direct_units) direct_sum += u;
    CHECK(direct_sum == out.total_fees);
}

TEST_CASE("direct baseline pays the signer everything") {
    const auto chain = chain_of({{2, 40, {}}, {3, 60, {}}});
    const auto out = compute_rewards(chain, 5);
    CHECK(out.direct_units[2] == 40);
    CHECK(out.direct_units[3] == 60);
    CHECK(out.blocks_signed[2] == 1);
    CHECK(out.blocks_signed[3] == 1);
}

TEST_CASE("a node with no confirmed and no uncle block in the window earns nothing") {
    // Node 4 never signs and never appears as an uncle.
    std::vector<std::tuple<NodeId, uint64_t, std::vector<UncleRef>>> steps;
    for (uint64_t h = 1; h <= 30; ++h)
        steps.emplace_back(static_cast<NodeId>(h % 4), 10, std::vector<UncleRef>{});
    const auto out = compute_rewards(chain_of(steps), 5);
    CHECK(out.fair_units[4] == 0);
    CHECK(out.direct_units[4] == 0);
}

TEST_CASE("an uncle-only node earns from the contract but not from direct rewards") {
    std::vector<std::tuple<NodeId, uint64_t, std::vector<UncleRef>>> steps;
    for (uint64_t h = 1; h <= 12; ++h)
        steps.emplace_back(static_cast<NodeId>(h % 3), 12, std::vector<UncleRef>{});
    std::get<2>(steps[5]).push_back(UncleRef{5, 4}); // node 4 active only via an uncle
    const auto out = compute_rewards(chain_of(steps), 5);
    CHECK(out.fair_units[4] > 0);
    CHECK(out.direct_units[4] == 0);
    CHECK(out.uncle_credits[4] == 1);
    CHECK(out.conservation_ok());
}
