#include <doctest.h>

#include <cmath>
#include <set>

#include "expaudit/rng.hpp"

using expaudit::CounterRng;

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible and keyed by all three components") {
    CounterRng a(1, "stage", 0), b(1, "stage", 0);
    for (int i = 0; i < 20; ++i) CHECK(a.next_u64() == b.next_u64());

    CounterRng base(1, "stage", 0), seed(2, "stage", 0), label(1, "other", 0),
        index(1, "stage", 1);
    bool differs_seed = false, differs_label = false, differs_index = false;
    CounterRng base2(1, "stage", 0);
    for (int i = 0; i < 8; ++i) {
        const std::uint64_t v = base2.next_u64();
        differs_seed |= v != seed.next_u64();
        differs_label |= v != label.next_u64();
        differs_index |= v != index.next_u64();
    }
    CHECK(differs_seed);
    CHECK(differs_label);
    CHECK(differs_index);
}

TEST_CASE("unit draws look uniform") {
    CounterRng rng(7, "uniform", 0);
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
    CHECK(std::abs(sumsq / n - 1.0 / 3.0) < 0.01);
}

TEST_CASE("coin flips are balanced") {
    CounterRng rng(7, "coin", 3);
    int heads = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) heads += rng.next_bit();
    CHECK(std::abs(heads / static_cast<double>(n) - 0.5) < 0.02);
}

TEST_CASE("bounded draws cover the range without bias") {
    CounterRng rng(21, "below", 0);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 14000; ++i) ++counts[rng.next_below(7)];
    for (int c : counts) {
        CHECK(c > 1700);
        CHECK(c < 2300);
    }
}

}  // TEST_SUITE
