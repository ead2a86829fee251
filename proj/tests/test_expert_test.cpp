#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "expaudit/expert_test.hpp"
#include "expaudit/io.hpp"
#include "expaudit/matching.hpp"
#include "test_helpers.hpp"

using namespace expaudit;
using namespace expaudit::expert_test;

namespace {

Eigen::VectorXi bits(const std::vector<int>& v) {
    Eigen::VectorXi out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

matching::PairSet consecutive_pairs(int n) {
    matching::PairSet p;
    for (int i = 0; i + 1 < n; i += 2) p.pairs.push_back({i, i + 1, 0.0});
    return p;
}

// Independent step-up oracle: adjusted_i = min over ranks s >= rank(i) of
// m * p_(s) / s, evaluated literally in O(m^2).
std::vector<double> bh_oracle(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<std::size_t> rank(m);
    for (std::size_t r = 0; r < m; ++r) rank[order[r]] = r + 1;
    std::vector<double> adjusted(m);
    for (std::size_t i = 0; i < m; ++i) {
        double best = 1.0;
        for (std::size_t s = rank[i]; s <= m; ++s) {
            const double candidate =
                p[order[s - 1]] * static_cast<double>(m) / static_cast<double>(s);
            best = std::min(best, candidate);
        }
        adjusted[i] = std::min(best, 1.0);
    }
    return adjusted;
}

}  // namespace

TEST_SUITE("expert_test") {

TEST_CASE("mismatch statistics") {
    const Eigen::VectorXi a = bits({1, 0, 1});
    const Eigen::VectorXi y = bits({1, 1, 0});
    CHECK(mse(a, y) == doctest::Approx(2.0));
    CHECK(mse_neg(a, y) == doctest::Approx(1.0));

    const Eigen::VectorXi same = bits({1, 1, 0, 0});
    CHECK(mse(same, same) == 0.0);
    CHECK(mse_neg(same, same) == 4.0);

    const Eigen::VectorXi flipped = Eigen::VectorXi::Ones(4) - same;
    CHECK(mse(flipped, same) == 4.0);
}

TEST_CASE("mse identity over random binary datasets") {
    for (std::uint64_t i = 0; i < 200; ++i) {
        CounterRng rng(3, "mse-identity", i);
        const auto n = static_cast<Eigen::Index>(2 + rng.next_below(60));
        Eigen::VectorXi a(n), y(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            a[k] = rng.next_bit();
            y[k] = rng.next_bit();
        }
        CHECK(mse(a, y) + mse_neg(a, y) == doctest::Approx(static_cast<double>(n)));
    }
}

TEST_CASE("all-tied pairs yield an exactly uniform p-value") {
    // Both members of every pair share the action, so no swap changes the
    // mismatch count and every comparison is decided by the tie-break draws.
    const int n = 40, k = 99;
    Eigen::VectorXi a(n), y(n);
    for (int i = 0; i < n; ++i) {
        a[i] = (i / 2) % 2;  // pair members identical
        y[i] = (i % 3) == 0;
    }
    const matching::PairSet pairs = consecutive_pairs(n);

    int rejections = 0;
    TestConfig cfg;
    cfg.k = k;
    cfg.label = "tied";
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        cfg.seed = seed;
        const TestResult r = run_expert_test(a, y, pairs, cfg);
        CHECK(r.mse_synth_min == r.mse_original);
        CHECK(r.mse_synth_max == r.mse_original);
        CHECK(r.raw_p >= 1.0 / (k + 1));
        if (r.raw_p <= 0.05) ++rejections;
    }
    // Exactly uniform: P(p <= 0.05) = 5/100 with K = 99.
    const double rate = rejections / 1000.0;
    CHECK(rate > 0.02);
    CHECK(rate < 0.08);
}

TEST_CASE("perfect signal rejects at the lattice floor") {
    // Ten pairs of {(a=1,y=1),(a=0,y=0)}: the original mismatch count is 0
    // and every effective swap adds 2, so synthetic counts follow
    // 2 * Binomial(10, 1/2) and tie with the original only with mass 2^-10.
    const int pairs_count = 10;
    Eigen::VectorXi a(2 * pairs_count), y(2 * pairs_count);
    for (int i = 0; i < pairs_count; ++i) {
        a[2 * i] = 1;
        y[2 * i] = 1;
        a[2 * i + 1] = 0;
        y[2 * i + 1] = 0;
    }
    const matching::PairSet pairs = consecutive_pairs(2 * pairs_count);

    TestConfig cfg;
    cfg.k = 1000;
    cfg.seed = 99;
    cfg.label = "perfect";
    const TestResult r = run_expert_test(a, y, pairs, cfg);
    CHECK(r.mse_original == 0.0);
    // Synthetic counts live on {0, 2, ..., 20}.
    CHECK(std::fmod(r.mse_synth_min, 2.0) == 0.0);
    CHECK(r.mse_synth_max <= 20.0);
    // P(tie) = 2^-10 per iteration; J > 9 has negligible probability.
    CHECK(r.raw_p <= 10.0 / 1001.0);

    // Two-tailed on the same data doubles the tail.
    const TestResult two = run_two_tailed(a, y, pairs, cfg);
    CHECK(two.raw_p == doctest::Approx(2.0 * (two.j + 1) / 1001.0));
    CHECK(two.raw_p <= 20.0 / 1001.0);

    // Anti-signal dataset: complementing the actions sends tau to the other
    // tail, and the folded two-tailed p-value is small again.
    const Eigen::VectorXi anti = Eigen::VectorXi::Ones(a.size()) - a;
    const TestResult neg = run_expert_test(anti, y, pairs, cfg);
    CHECK(neg.raw_p > 0.9);  // positive tail sees nothing
    TestConfig negdir = cfg;
    negdir.direction = Direction::negative;
    const TestResult negtest = run_expert_test(anti, y, pairs, negdir);
    CHECK(negtest.raw_p <= 10.0 / 1001.0);  // complemented statistic recovers it
    const TestResult twofold = run_two_tailed(anti, y, pairs, cfg);
    CHECK(twofold.raw_p <= 20.0 / 1001.0);
}

TEST_CASE("p-values live on the (J+1)/(K+1) lattice") {
    CounterRng rng(17, "lattice-data", 0);
    const int n = 60;
    Eigen::VectorXi a(n), y(n);
    for (int i = 0; i < n; ++i) {
        a[i] = rng.next_bit();
        y[i] = rng.next_bit();
    }
    const matching::PairSet pairs = consecutive_pairs(n);
    TestConfig cfg;
    cfg.k = 1000;
    cfg.label = "lattice";
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        const TestResult r = run_expert_test(a, y, pairs, cfg);
        const double scaled = r.raw_p * (cfg.k + 1);
        CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
        CHECK(r.raw_p == doctest::Approx((r.j + 1.0) / (cfg.k + 1.0)));
        CHECK(r.tau == doctest::Approx(static_cast<double>(r.j) / cfg.k));
        CHECK(r.min_attainable_p == doctest::Approx(1.0 / 1001.0));
    }
    // The lattice value the published tables keep showing: J=19, K=1000.
    CHECK(20.0 / 1001.0 == doctest::Approx(0.019980).epsilon(1e-6));
}

TEST_CASE("determinism and seed sensitivity") {
    CounterRng data_rng(71, "det-data", 0);
    const int n = 120;
    Eigen::VectorXi a(n), y(n);
    for (int i = 0; i < n; ++i) {
        a[i] = data_rng.next_bit();
        y[i] = data_rng.next_bit();
    }
    const matching::PairSet pairs = consecutive_pairs(n);

    TestConfig cfg;
    cfg.k = 300;
    cfg.seed = 12;
    cfg.label = "det";
    const TestResult r1 = run_expert_test(a, y, pairs, cfg);
    const TestResult r2 = run_expert_test(a, y, pairs, cfg);
    CHECK(r1.j == r2.j);
    CHECK(r1.raw_p == r2.raw_p);
    CHECK(r1.mse_synth_median == r2.mse_synth_median);

    cfg.seed = 13;
    const TestResult r3 = run_expert_test(a, y, pairs, cfg);
    CHECK(r3.j != r1.j);  // different stream, different draws

    cfg.seed = 12;
    cfg.label = "other-hypothesis";
    const TestResult r4 = run_expert_test(a, y, pairs, cfg);
    CHECK(r4.j != r1.j);
}

TEST_CASE("step-up adjustment examples") {
    CHECK(benjamini_hochberg({0.03}) == std::vector<double>{0.03});

    const std::vector<double> adj = benjamini_hochberg({0.01, 0.02, 0.03, 0.04});
    for (double v : adj) CHECK(v == doctest::Approx(0.04));

    const std::vector<double> equal = benjamini_hochberg({0.2, 0.2, 0.2});
    for (double v : equal) CHECK(v == doctest::Approx(0.2));

    CHECK_THROWS_AS(benjamini_hochberg({0.0, 0.5}), ValidationError);
}

TEST_CASE("step-up adjustment matches the quadratic oracle") {
    for (std::uint64_t trial = 0; trial < 300; ++trial) {
        CounterRng rng(23, "bh", trial);
        const std::size_t m = 1 + rng.next_below(40);
        std::vector<double> p(m);
        for (auto& v : p) {
            v = rng.next_unit();
            if (v == 0.0) v = 0.5;
            if (rng.next_below(10) == 0) v = 0.25;  // force ties regularly
        }
        const std::vector<double> fast = benjamini_hochberg(p);
        const std::vector<double> slow = bh_oracle(p);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(std::abs(fast[i] - slow[i]) < 1e-12);
            CHECK(fast[i] >= p[i] - 1e-15);
            CHECK(fast[i] <= 1.0);
        }
    }
}

TEST_CASE("swap classification") {
    const Eigen::VectorXi a = bits({1, 0, 1, 0, 1, 1});
    const Eigen::VectorXi y = bits({1, 0, 0, 1, 0, 0});
    matching::PairSet pairs;
    pairs.pairs = {{0, 1, 0.0}, {2, 3, 0.0}, {4, 5, 0.0}};
    const SwapDiagnostics d = swap_diagnostics(a, y, pairs);
    // Pair (0,1): {(1,1),(0,0)} -> both mismatch after swap: increase.
    // Pair (2,3): {(1,0),(0,1)} -> both match after swap: decrease.
    // Pair (4,5): equal actions -> neutral.
    CHECK(d.could_increase == 1);
    CHECK(d.could_decrease == 1);
    CHECK(d.neutral == 1);
    CHECK(d.action_count == 4);
}

TEST_CASE("family runs and adjusts both directions per action") {
    const auto model = testutil::build_m1x(0.5);
    AuditDataset ds = io::sample_from_scm(model, 160, 21);
    // Duplicate the action column under a second name to get a 4-hypothesis family.
    ds.action_names = {"alpha", "beta"};
    Eigen::MatrixXi two(ds.actions.rows(), 2);
    two.col(0) = ds.actions.col(0);
    two.col(1) = ds.actions.col(0);
    ds.actions = two;

    const AuditDataset scaled = matching::scale_features(ds);
    const matching::PairSet pairs = matching::greedy_pair(scaled, 60, false);
    TestConfig cfg;
    cfg.k = 400;
    cfg.seed = 5;
    const FamilyResult fam = run_family(scaled, pairs, cfg, true);
    REQUIRE(fam.hypotheses.size() == 4);
    REQUIRE(fam.diagnostics.size() == 2);
    for (const auto& h : fam.hypotheses) {
        CHECK(h.adjusted_p >= h.result.raw_p);
        CHECK(h.adjusted_p <= 1.0);
        CHECK(h.significant == (h.adjusted_p < cfg.alpha));
    }
    // Same data under different labels draws independent randomness but the
    // verdict pattern is shared: positive significant, negative not.
    CHECK(fam.hypotheses[0].significant);
    CHECK_FALSE(fam.hypotheses[1].significant);
    CHECK(fam.hypotheses[2].significant);
    CHECK_FALSE(fam.hypotheses[3].significant);
}

TEST_CASE("type-I control on the null model at unit-test scale") {
    const auto model = testutil::build_null_xay();
    int rejections = 0;
    const int runs = 120;
    for (int rep = 0; rep < runs; ++rep) {
        const AuditDataset ds =
            io::sample_from_scm(model, 230, 1000 + static_cast<std::uint64_t>(rep));
        const AuditDataset scaled = matching::scale_features(ds);
        const matching::PairSet pairs = matching::greedy_pair(scaled, 100, false);
        TestConfig cfg;
        cfg.k = 200;
        cfg.seed = static_cast<std::uint64_t>(rep);
        cfg.label = "null-check";
        const TestResult r = run_expert_test(scaled, pairs, cfg);
        if (r.raw_p <= 0.05) ++rejections;
    }
    CHECK(static_cast<double>(rejections) / runs <= 0.10);  // acceptance runs 500 at 0.07
}

TEST_CASE("power grows with the number of pairs") {
    const auto model = testutil::build_m1(0.5);
    const std::vector<int> pair_counts = {25, 50, 100, 200};
    std::vector<double> rates;
    for (int pair_count : pair_counts) {
        int rejections = 0;
        const int reps = 200;
        for (int rep = 0; rep < reps; ++rep) {
            const AuditDataset ds = io::sample_from_scm(
                model, 2 * pair_count, 500 + static_cast<std::uint64_t>(rep));
            const matching::PairSet pairs = matching::greedy_pair(ds, pair_count, false);
            TestConfig cfg;
            cfg.k = 200;
            cfg.seed = static_cast<std::uint64_t>(rep);
            cfg.label = "power-l" + std::to_string(pair_count);
            if (run_expert_test(ds, pairs, cfg).raw_p <= 0.05) ++rejections;
        }
        rates.push_back(static_cast<double>(rejections) / reps);
    }
    for (std::size_t i = 1; i < rates.size(); ++i)
        CHECK(rates[i] >= rates[i - 1] - 0.03);  // sampling slack
    CHECK(rates.back() >= 0.95);
}

TEST_CASE("input validation") {
    const Eigen::VectorXi a = bits({1, 0});
    const Eigen::VectorXi y = bits({1, 1});
    TestConfig cfg;
    CHECK_THROWS_AS(run_expert_test(a, y, matching::PairSet{}, cfg), EmptyPairSet);

    matching::PairSet overlapping;
    overlapping.pairs = {{0, 1, 0.0}, {1, 0, 0.0}};
    CHECK_THROWS_AS(run_expert_test(a, y, overlapping, cfg), ValidationError);

    TestConfig bad;
    bad.k = 0;
    CHECK_THROWS_AS(run_expert_test(a, y, consecutive_pairs(2), bad), ValidationError);
}

}  // TEST_SUITE
