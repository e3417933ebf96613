#include <doctest.h>

#include <algorithm>
#include <memory>

#include "exclique/ledger.hpp"
#include "exclique/rng.hpp"
#include "exclique/schedule.hpp"

using namespace exclique;

namespace {

Transaction mk_tx(uint64_t seed) {
    Transaction tx;
    tx.id = Hash256::from_seed(seed);
    tx.payload_size = 110;
    tx.nonce = seed;
    tx.fee = 1 + seed % 7;
    return tx;
}

BlockPtr mk_block(const BlockPtr& parent, NodeId signer, BlockKind kind, uint32_t txs,
                  double at = 0, uint64_t tx_seed = 900) {
    auto b = std::make_shared<Block>();
    b->step = parent->step + 1;
    b->parent_id = parent->id();
    b->signer = signer;
    b->kind = kind;
    b->created_at = at;
    for (uint32_t i = 0; i < txs; ++i) b->txs.push_back(mk_tx(tx_seed + i));
    b->seal();
    return b;
}

ProtocolParams params_n(uint32_t n) {
    ProtocolParams p;
    p.n = n;
    p.m = 100;
    return p;
}

} // namespace

TEST_CASE("block canonical serialization round-trips byte-identically") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    auto b = mk_block(genesis, 2, BlockKind::InTurn, 5, 1234.5);
    auto bytes = b->serialize();
    CHECK(bytes.size() == b->wire_size());
    Block back = Block::deserialize(bytes);
    CHECK(back.serialize() == bytes);
    CHECK(back.id() == b->id());
    CHECK(back.tx_count() == 5);
    CHECK(back.fee_total() == b->fee_total());
}

TEST_CASE("weight follows the block kind") {
    CHECK(block_weight(BlockKind::InTurn) == 2);
    CHECK(block_weight(BlockKind::NoTurn) == 1);
    CHECK(block_weight(BlockKind::Genesis) == 0);
}

TEST_CASE("genesis plus one in-turn block extends the chain") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    auto b1 = mk_block(genesis, 2, BlockKind::InTurn, 3);
    auto up = led.append_candidate(b1);
    CHECK(up.outcome == LedgerOutcome::Extended);
    CHECK(led.head_id() == b1->id());
    CHECK(led.head_weight() == 2);
}

TEST_CASE("in-turn block displaces a no-turn block at the same step") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    auto no_turn = mk_block(genesis, 3, BlockKind::NoTurn, 2, 10.0);
    auto in_turn = mk_block(genesis, 2, BlockKind::InTurn, 3, 5.0);
    CHECK(led.append_candidate(no_turn).outcome == LedgerOutcome::Extended);
    auto up = led.append_candidate(in_turn);
    CHECK(up.outcome == LedgerOutcome::Reorged);
    CHECK(led.head_id() == in_turn->id());
    REQUIRE(up.abandoned.size() == 1);
    CHECK(up.abandoned[0]->id() == no_turn->id());
    REQUIRE(up.adopted.size() == 1);
    CHECK(up.adopted[0]->id() == in_turn->id());
}

TEST_CASE("equal-weight no-turn tips break deterministically toward the smaller hash") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    auto a = mk_block(genesis, 3, BlockKind::NoTurn, 1, 1.0, 100);
    auto b = mk_block(genesis, 4, BlockKind::NoTurn, 1, 2.0, 200);
    const BlockId expect = std::min(a->id(), b->id());

    Ledger first(genesis);
    CHECK(first.append_candidate(a).outcome == LedgerOutcome::Extended);
    auto up1 = first.append_candidate(b);
    CHECK(up1.deadlock_tie);
    CHECK(first.head_id() == expect);

    Ledger second(genesis);
    CHECK(second.append_candidate(b).outcome == LedgerOutcome::Extended);
    auto up2 = second.append_candidate(a);
    CHECK(up2.deadlock_tie);
    CHECK(second.head_id() == expect);
    // One ordering sees a fork, the other a reorg; the head agrees.
}

TEST_CASE("unknown parent and duplicates are rejected") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    auto b1 = mk_block(genesis, 2, BlockKind::InTurn, 1);
    auto b2 = mk_block(b1, 3, BlockKind::InTurn, 1);
    auto orphaned = led.append_candidate(b2);
    CHECK(orphaned.outcome == LedgerOutcome::Rejected);
    CHECK(orphaned.reject == LedgerReject::UnknownParent);
    CHECK(led.append_candidate(b1).outcome == LedgerOutcome::Extended);
    auto dup = led.append_candidate(b1);
    CHECK(dup.outcome == LedgerOutcome::Rejected);
    CHECK(dup.reject == LedgerReject::DuplicateBlock);
}

TEST_CASE("fork choice is independent of delivery order") {
    // A small tree: steps 1-2 with competing in-turn/no-turn blocks.
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    auto a1 = mk_block(genesis, 2, BlockKind::InTurn, 1, 0, 10);
    auto b1 = mk_block(genesis, 3, BlockKind::NoTurn, 1, 0, 20);
    auto a2 = mk_block(a1, 3, BlockKind::InTurn, 1, 0, 30);
    auto b2 = mk_block(b1, 4, BlockKind::NoTurn, 1, 0, 40);
    auto b3 = mk_block(b2, 0, BlockKind::InTurn, 1, 0, 50);
    std::vector<BlockPtr> blocks{a1, b1, a2, b2, b3};

    // Expected head: weight(b1+b2+b3)=1+1+2=4 beats weight(a1+a2)=2+2=4 only
    // via the hash tie-break, so compute it with one reference order.
    Ledger ref(genesis);
    for (const auto& b : blocks) ref.append_candidate(b);
    const BlockId expected = ref.head_id();
    const uint64_t expected_w = ref.head_weight();

    std::sort(blocks.begin(), blocks.end(),
              [](const BlockPtr& x, const BlockPtr& y) { return x->id() < y->id(); });
    int perms = 0;
    do {
        Ledger led(genesis);
        std::vector<BlockPtr> pending(blocks.begin(), blocks.end());
        // Orphans re-queue until their parent lands.
        uint64_t max_weight_seen = 0;
        while (!pending.empty()) {
            std::vector<BlockPtr> next;
            for (const auto& b : pending) {
                auto up = led.append_candidate(b);
                if (up.reject == LedgerReject::UnknownParent) next.push_back(b);
            }
            REQUIRE(next.size() < pending.size());
            pending = std::move(next);
            REQUIRE(led.head_weight() >= max_weight_seen); // weight monotonicity
            max_weight_seen = led.head_weight();
        }
        CHECK(led.head_id() == expected);
        CHECK(led.head_weight() == expected_w);
        ++perms;
    } while (std::next_permutation(blocks.begin(), blocks.end(),
                                   [](const BlockPtr& x, const BlockPtr& y) {
                                       return x->id() < y->id();
                                   }));
    CHECK(perms == 120);
}

TEST_CASE("priority property: the in-turn block wins its step") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Ledger led(genesis);
        auto in_turn = mk_block(genesis, 2, BlockKind::InTurn, 1, 0, 1000 + trial);
        std::vector<BlockPtr> all{in_turn};
        for (int j = 0; j < 2; ++j)
            all.push_back(mk_block(genesis, 3 + j, BlockKind::NoTurn, 1, 0,
                                   2000 + trial * 10 + j));
        // random delivery order
        for (int j = static_cast<int>(all.size()) - 1; j > 0; --j)
            std::swap(all[j], all[rng.below(static_cast<uint64_t>(j + 1))]);
        for (const auto& b : all) led.append_candidate(b);
        CHECK(led.head_id() == in_turn->id());
    }
}

TEST_CASE("verification accepts the scheduled in-turn signer with fresh recents") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    ProtocolParams p = params_n(5);
    // Step 1, fixed order: in-turn signer is (1+1) % 5 = 2.
    auto good = mk_block(genesis, 2, BlockKind::InTurn, 1);
    CHECK(verify_block(led, *good, p).ok);
    auto wrong = mk_block(genesis, 3, BlockKind::InTurn, 1);
    auto vr = verify_block(led, *wrong, p);
    CHECK_FALSE(vr.ok);
    CHECK(vr.reason == VerifyReject::NotAuthorized);
}

TEST_CASE("a signer inside the recents window is rejected") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    ProtocolParams p = params_n(5); // window floor(5/2) = 2
    auto b1 = mk_block(genesis, 2, BlockKind::InTurn, 1);
    led.append_candidate(b1);
    auto b2 = mk_block(b1, 3, BlockKind::InTurn, 1);
    led.append_candidate(b2);
    // Node 3 signed step 2; a no-turn block from it at step 3 must fail.
    auto again = mk_block(b2, 3, BlockKind::NoTurn, 1);
    auto vr = verify_block(led, *again, p);
    CHECK_FALSE(vr.ok);
    CHECK(vr.reason == VerifyReject::RecentSigner);
}

TEST_CASE("no-turn eligibility enumerated for a five-node network") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    ProtocolParams p = params_n(5);
    auto b1 = mk_block(genesis, 2, BlockKind::InTurn, 1);
    led.append_candidate(b1);
    // Step 2: in-turn is (2+1)%5 = 3; recents = {2}; eligible no-turn set is
    // the first floor(6/2)-1 = 2 indexes after 3 skipping recents: {4, 0}.
    auto recents = led.recent_signers(led.head_id(), p.recents_window());
    auto elig = no_turn_set(3, recents, 5);
    REQUIRE(elig.has_value());
    CHECK(*elig == std::vector<NodeId>{4, 0});

    auto ok_no_turn = mk_block(b1, 4, BlockKind::NoTurn, 1);
    CHECK(verify_block(led, *ok_no_turn, p).ok);
    auto outsider = mk_block(b1, 1, BlockKind::NoTurn, 1);
    auto vr = verify_block(led, *outsider, p);
    CHECK_FALSE(vr.ok);
    CHECK(vr.reason == VerifyReject::NotAuthorized);
}

TEST_CASE("capacity overflow is rejected") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    ProtocolParams p = params_n(5);
    p.m = 3;
    auto fat = mk_block(genesis, 2, BlockKind::InTurn, 4);
    auto vr = verify_block(led, *fat, p);
    CHECK_FALSE(vr.ok);
    CHECK(vr.reason == VerifyReject::CapacityExceeded);
}

TEST_CASE("uncle collection sees non-canonical blocks once") {
    auto genesis = std::make_shared<Block>(Block::genesis(4));
    Ledger led(genesis);
    auto in1 = mk_block(genesis, 2, BlockKind::InTurn, 1, 0, 1);
    auto no1 = mk_block(genesis, 3, BlockKind::NoTurn, 1, 0, 2);
    led.append_candidate(in1);
    led.append_candidate(no1); // loses, sits as uncle candidate
    auto uncles = led.collect_uncles(led.head_id(), 5);
    REQUIRE(uncles.size() == 1);
    CHECK(uncles[0].step == 1);
    CHECK(uncles[0].signer == 3);

    // Once referenced by a committed block it is not offered again.
    auto in2 = mk_block(in1, 3, BlockKind::InTurn, 1, 0, 3);
    auto with_ref = std::make_shared<Block>(*in2);
    {
        Block tmp = *in2;
        tmp.uncle_refs = uncles;
        tmp.seal();
        with_ref = std::make_shared<Block>(std::move(tmp));
    }
    led.append_candidate(with_ref);
    CHECK(led.collect_uncles(led.head_id(), 5).empty());
}

TEST_CASE("differential order follows the previous committed signer") {
    CHECK(in_turn_signer(3, OrderMode::Fixed, 0, 5) == 4);
    CHECK(in_turn_signer(7, OrderMode::Differential, 2, 5) == 3);
    CHECK(in_turn_signer(7, OrderMode::Differential, 4, 5) == 0);
}
