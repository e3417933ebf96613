#include <doctest.h>

#include <cmath>

#include "exclique/analytics.hpp"
#include "exclique/rng.hpp"

using namespace exclique;

TEST_CASE("lambda0 arithmetic and scaling") {
    CHECK(lambda0(8550, 3000) == doctest::Approx(2850.0));
    CHECK(lambda0(0, 3000) == 0.0);
    CHECK(lambda0(5000, 1500) == doctest::Approx(2.0 * lambda0(5000, 3000)));
}

TEST_CASE("find_m_star on a linear cost model") {
    const auto res = find_m_star([](uint64_t m) { return 0.3 * static_cast<double>(m); }, 3000);
    REQUIRE(res.feasible);
    CHECK(res.m_star == 10000);
}

TEST_CASE("find_m_star agrees with an exhaustive scan on affine defaults") {
    CostModel cost;
    const auto f = [&](uint64_t m) {
        return 190.0 + 0.0285 * static_cast<double>(m) + cost.vra_ms(m);
    };
    const auto res = find_m_star(f, 3000);
    REQUIRE(res.feasible);
    // Brute-force oracle over the full m grid.
    uint64_t best = 0;
    for (uint64_t m = 0; m <= 2 * res.m_star + 10; ++m)
        if (f(m) <= 3000) best = m;
    CHECK(res.m_star == best);
}

TEST_CASE("find_m_star reports infeasibility when even the empty block overruns") {
    const auto res = find_m_star([](uint64_t) { return 4000.0; }, 3000);
    CHECK_FALSE(res.feasible);
}

TEST_CASE("delta1 closed form matches the paper's 500 ms for default w") {
    CHECK(delta1_ms(21, 5500) == doctest::Approx(500.0));
    CHECK(delta1_ms(5, 1500) == doctest::Approx(500.0));
    CHECK(delta1_ms(101, 25500) == doctest::Approx(500.0));
}

TEST_CASE("delta1 agrees with the Monte-Carlo minimum oracle within 2%") {
    for (uint32_t n : {5u, 21u, 101u}) {
        const double w = (n / 2 + 1) * 500.0;
        const uint32_t k = (n + 1) / 2 - 1;
        Rng rng(1000 + n);
        double sum = 0;
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            double mn = w;
            for (uint32_t i = 0; i < k; ++i) mn = std::min(mn, rng.uniform(0.0, w));
            sum += mn;
        }
        const double mc = sum / trials;
        const double model = delta1_ms(n, w);
        CHECK(std::abs(mc - model) / model < 0.02);
    }
}

TEST_CASE("lambda1 reduction at default parameters is 14.3%") {
    const double l0 = lambda0(8550, 3000);
    const double l1 = lambda1(8550, 3000, 500);
    CHECK(l1 / l0 == doctest::Approx(6.0 / 7.0));
    const double reduction = 1.0 - l1 / l0;
    CHECK(reduction == doctest::Approx(0.142857).epsilon(0.001));
    CHECK(lambda1(8550, 3000, 0) == doctest::Approx(l0));
}

TEST_CASE("conditional expectation oracle: two seeds agree within 1%") {
    const double a = cond_exp_delta_ms(21, 5500, 400000, 1);
    const double b = cond_exp_delta_ms(21, 5500, 400000, 2);
    CHECK(std::abs(a - b) / a < 0.01);
    // Order-statistic closed form for iid minima: E|X-Y| = 2wK/((K+1)(2K+1)).
    const double closed = 2.0 * 5500 * 10.0 / (11.0 * 21.0);
    CHECK(std::abs(a - closed) / closed < 0.01);
}

TEST_CASE("lambda3 degenerates to half lambda0 as w -> 0") {
    const double l3 = lambda3(9000, 3000, 21, 1e-9);
    CHECK(l3 == doctest::Approx(0.5 * lambda0(9000, 3000)).epsilon(1e-6));
}

TEST_CASE("the two exceptional-case-3 scenarios are equally likely") {
    Rng rng(5);
    const uint32_t k = 10;
    const double w = 5500;
    auto draw_min = [&]() {
        double mn = w;
        for (uint32_t i = 0; i < k; ++i) mn = std::min(mn, rng.uniform(0.0, w));
        return mn;
    };
    int ge = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t)
        if (draw_min() >= draw_min()) ++ge;
    CHECK(std::abs(ge / static_cast<double>(trials) - 0.5) < 0.01);
}

TEST_CASE("expected TPS combination") {
    const double l0 = lambda0(8550, 3000);
    CHECK(expected_tps(CaseRates{1, 0, 0, 0}, l0, 500, 476, 3000) == doctest::Approx(l0));
    CHECK(expected_tps(CaseRates{0, 1, 0, 0}, l0, 500, 476, 3000) ==
          doctest::Approx(l0 * 6.0 / 7.0));
    CHECK(expected_tps(CaseRates{0, 0, 1, 0}, l0, 500, 476, 3000) == 0.0);
}

TEST_CASE("fork model values and edge cases") {
    CHECK(fork_prob_single(0, 0, 5500) == 0.0);
    CHECK(fork_prob(0, 21) == 0.0);
    CHECK(fork_prob_single(2000, 750, 5500) == doctest::Approx(0.5));
    CHECK(fork_prob(0.5, 21) == doctest::Approx(1.0 - std::pow(0.5, 10)));
    CHECK(fork_prob_accurate(2000, 750, 2750, 5500, 21) == 0.0);
    // clamped when b+v exceeds w
    CHECK(fork_prob_single(9000, 0, 5500) == 1.0);
}

TEST_CASE("fork model agrees with a Bernoulli race simulation") {
    // 10 no-turn timers, each uniform on (0,w); fork iff any fires before b+v.
    Rng rng(31);
    const double w = 5500, bv = 2750;
    int forks = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        bool fork = false;
        for (int i = 0; i < 10 && !fork; ++i) fork = rng.uniform(0.0, w) < bv;
        if (fork) ++forks;
    }
    const double measured = forks / static_cast<double>(trials);
    const double model = fork_prob(fork_prob_single(bv, 0, w), 21);
    CHECK(std::abs(measured - model) < 0.005);
}

TEST_CASE("fork probability is monotone in b+v and in n") {
    double prev = 0;
    for (double bv = 0; bv <= 5500; bv += 250) {
        const double p = fork_prob(fork_prob_single(bv, 0, 5500), 21);
        CHECK(p >= prev);
        prev = p;
    }
    for (uint32_t n = 5; n <= 101; n += 2)
        CHECK(fork_prob(0.1, n) >= fork_prob(0.1, n > 5 ? n - 2 : 5));
}

// --------------------------------------------------------------------------
// Trace classification on synthetic traces.
// --------------------------------------------------------------------------

namespace {

struct TraceBuilder {
    std::vector<TraceRec> recs;
    int next_id = 0;
    std::string prev = "G";

    TraceBuilder() {
        TraceRec g;
        g.kind = TraceRec::Kind::Genesis;
        g.id = "G";
        recs.push_back(g);
    }

    std::string produce(Step step, BlockKind kind, uint32_t txs, double t, double x = 0,
                        bool on_chain = true) {
        TraceRec r;
        r.kind = TraceRec::Kind::Produce;
        r.t = t;
        r.step = step;
        r.node = 1;
        r.block_kind = kind;
        r.tx_count = txs;
        r.bytes = 60 + 114ull * txs;
        r.x_ms = x;
        r.v_ms = 8;
        r.r_ms = 2;
        r.a_ms = 6;
        r.id = "B" + std::to_string(next_id++);
        r.id2 = prev;
        if (on_chain) prev = r.id;
        recs.push_back(r);
        return r.id;
    }

    std::vector<TraceRec> finish(Step final_step) {
        TraceRec f;
        f.kind = TraceRec::Kind::Final;
        f.id = prev;
        f.step = final_step;
        recs.push_back(f);
        return recs;
    }
};

} // namespace

TEST_CASE("all-in-turn trace classifies as pure normal case") {
    TraceBuilder tb;
    for (Step h = 1; h <= 20; ++h) tb.produce(h, BlockKind::InTurn, 50, 3000.0 * h);
    const auto ct = classify_trace(tb.finish(20), 0);
    REQUIRE(ct.steps.size() == 20);
    CHECK(ct.measured.rates.p0 == doctest::Approx(1.0));
    CHECK(ct.measured.fork_rate == 0.0);
    // 50 txs per 3 s step
    CHECK(ct.measured.tps == doctest::Approx(50.0 / 3.0).epsilon(0.01));
}

TEST_CASE("failure between in-turn neighbours produces Exc1 then Exc2") {
    TraceBuilder tb;
    tb.produce(1, BlockKind::InTurn, 50, 3000);
    tb.produce(2, BlockKind::NoTurn, 50, 6700, 700); // in-turn failed; no-turn won
    tb.produce(3, BlockKind::InTurn, 0, 9000);       // squeezed: empty block
    tb.produce(4, BlockKind::InTurn, 50, 12000);
    const auto ct = classify_trace(tb.finish(4), 0);
    REQUIRE(ct.steps.size() == 4);
    CHECK(ct.steps[0].step_case == StepCase::Normal);
    CHECK(ct.steps[1].step_case == StepCase::Exc1);
    CHECK(ct.steps[2].step_case == StepCase::Exc2);
    CHECK(ct.steps[2].kind == CommittedKind::Empty);
    CHECK(ct.steps[3].step_case == StepCase::Normal);
    CHECK(ct.steps[1].x_ms == doctest::Approx(700.0));
}

TEST_CASE("consecutive no-turn commits classify as Exc3 and forks are counted") {
    TraceBuilder tb;
    tb.produce(1, BlockKind::InTurn, 50, 3000);
    tb.produce(2, BlockKind::NoTurn, 50, 6900, 900);
    tb.produce(3, BlockKind::NoTurn, 50, 10100, 1100);
    tb.produce(3, BlockKind::NoTurn, 10, 10200, 1200, /*on_chain=*/false); // losing fork
    tb.produce(4, BlockKind::InTurn, 50, 12000);
    const auto ct = classify_trace(tb.finish(4), 0);
    REQUIRE(ct.steps.size() == 4);
    CHECK(ct.steps[1].step_case == StepCase::Exc1);
    CHECK(ct.steps[2].step_case == StepCase::Exc3);
    CHECK(ct.steps[2].fork);
    CHECK_FALSE(ct.steps[1].fork);
    CHECK(ct.steps[3].step_case == StepCase::Exc2);
    CHECK(ct.measured.rates.p0 + ct.measured.rates.p1 + ct.measured.rates.p2 +
              ct.measured.rates.p3 ==
          doctest::Approx(1.0));
    CHECK(ct.measured.fork_rate == doctest::Approx(0.25));
}

TEST_CASE("empty in-turn block after an in-turn block is an exceptional case, not normal") {
    TraceBuilder tb;
    tb.produce(1, BlockKind::InTurn, 50, 3000);
    tb.produce(2, BlockKind::InTurn, 0, 6000);
    const auto ct = classify_trace(tb.finish(2), 0);
    CHECK(ct.steps[1].kind == CommittedKind::Empty);
    CHECK(ct.steps[1].step_case == StepCase::Exc2);
}

TEST_CASE("broken traces are rejected with context") {
    TraceBuilder tb;
    tb.produce(1, BlockKind::InTurn, 5, 3000);
    SUBCASE("missing final record") {
        CHECK_THROWS_AS(classify_trace(tb.recs, 0), MalformedTrace);
    }
    SUBCASE("dangling parent link") {
        auto recs = tb.recs;
        TraceRec f;
        f.kind = TraceRec::Kind::Final;
        f.id = "nonexistent";
        f.step = 1;
        recs.push_back(f);
        CHECK_THROWS_AS(classify_trace(recs, 0), MalformedTrace);
    }
}
