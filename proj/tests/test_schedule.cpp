#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "exclique/schedule.hpp"

using namespace exclique;

namespace {

// Kolmogorov-Smirnov distance of samples against U(lo, hi).
double ks_distance(std::vector<double> xs, double lo, double hi) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = (xs[i] - lo) / (hi - lo);
        d = std::max(d, std::abs((static_cast<double>(i) + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

} // namespace

TEST_CASE("no-turn set size and membership") {
    std::vector<NodeId> none;
    auto s5 = no_turn_set(3, none, 5);
    REQUIRE(s5.has_value());
    CHECK(s5->size() == 2); // floor(6/2) - 1
    auto s21 = no_turn_set(0, none, 21);
    REQUIRE(s21.has_value());
    CHECK(s21->size() == 10); // floor(22/2) - 1

    // Walks ascending from in_turn+1 and skips the recents window.
    std::vector<NodeId> recents{4, 0};
    auto s = no_turn_set(3, recents, 5);
    REQUIRE(s.has_value());
    CHECK(*s == std::vector<NodeId>{1, 2});
}

TEST_CASE("a signer leaves the recents window after floor(n/2) steps") {
    // n=5, window 2. Scripted 8-step signer schedule; node 2 signs step 1 and
    // becomes eligible again from step 4 on.
    const uint32_t n = 5;
    std::vector<NodeId> signers{2, 3, 4, 0, 1, 2, 3, 4}; // steps 1..8
    for (Step h = 3; h <= 8; ++h) {
        std::vector<NodeId> recents; // signers of steps h-1, h-2
        recents.push_back(signers[h - 2]);
        recents.push_back(signers[h - 3]);
        auto s = no_turn_set(signers[h - 1], recents, n);
        REQUIRE(s.has_value());
        const bool two_eligible =
            std::find(s->begin(), s->end(), NodeId{2}) != s->end() || signers[h - 1] == 2 ||
            std::find(recents.begin(), recents.end(), NodeId{2}) != recents.end();
        CHECK(two_eligible); // node 2 is always accounted for: signer, recent, or eligible
    }
    // Directly: at step 4 (in-turn 0, recents {4,3}) node 2 signed 3 steps ago
    // with window 2, so it is eligible again.
    auto s = no_turn_set(0, std::vector<NodeId>{4, 3}, n);
    REQUIRE(s.has_value());
    CHECK(std::find(s->begin(), s->end(), NodeId{2}) != s->end());
}

TEST_CASE("insufficient eligible nodes is signalled, not fudged") {
    // Every other node recently signed.
    std::vector<NodeId> recents{0, 1, 2, 3};
    CHECK_FALSE(no_turn_set(4, recents, 5).has_value());
}

TEST_CASE("naive delay: expected minimum of the no-turn field is w/floor((n+1)/2)") {
    // n=21: 10 no-turn nodes, w = 5500 -> expected minimum 500 ms.
    const double w = 5500;
    Rng rng(123);
    double sum = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        double mn = w;
        for (int i = 0; i < 10; ++i)
            mn = std::min(mn, sample_delay(DelayMode::Naive, w, 0, rng).x_ms);
        sum += mn;
    }
    const double mean_min = sum / trials;
    CHECK(mean_min > 500.0 * 0.98);
    CHECK(mean_min < 500.0 * 1.02);
}

TEST_CASE("accurate delay draws from (beta, w) and degrades to the naive range at beta 0") {
    Rng rng(9);
    const double w = 5500, beta = 2750;
    for (int i = 0; i < 20000; ++i) {
        const auto s = sample_delay(DelayMode::Accurate, w, beta, rng);
        REQUIRE(s.x_ms >= beta);
        REQUIRE(s.x_ms < w);
        REQUIRE_FALSE(s.beta_clamped);
    }
    const auto z = sample_delay(DelayMode::Accurate, w, 0, rng);
    CHECK(z.x_ms < w);
}

TEST_CASE("beta at or above w clamps to 0.95 w and reports it") {
    Rng rng(10);
    const double w = 1000;
    for (int i = 0; i < 1000; ++i) {
        const auto s = sample_delay(DelayMode::Accurate, w, 1200, rng);
        CHECK(s.beta_clamped);
        REQUIRE(s.x_ms >= 0.95 * w);
        REQUIRE(s.x_ms < w);
    }
}

TEST_CASE("degenerate w = 0 always yields zero delay") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) CHECK(sample_delay(DelayMode::Naive, 0, 0, rng).x_ms == 0.0);
}

TEST_CASE("sampled delays pass a KS uniformity test at 1% significance") {
    const int n = 100000;
    const double crit = 1.628 / std::sqrt(static_cast<double>(n)); // alpha = 0.01

    Rng rng(77);
    std::vector<double> naive;
    naive.reserve(n);
    for (int i = 0; i < n; ++i) naive.push_back(sample_delay(DelayMode::Naive, 5500, 0, rng).x_ms);
    CHECK(ks_distance(std::move(naive), 0, 5500) < crit);

    std::vector<double> accurate;
    accurate.reserve(n);
    for (int i = 0; i < n; ++i)
        accurate.push_back(sample_delay(DelayMode::Accurate, 5500, 1700, rng).x_ms);
    CHECK(ks_distance(std::move(accurate), 1700, 5500) < crit);
}
