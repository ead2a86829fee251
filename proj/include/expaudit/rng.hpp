#pragma once

#include <cstdint>
#include <string_view>

namespace expaudit {

// ---------------------------------------------------------------------------
// CounterRng — counter-based pseudorandom stream keyed by (seed, label, index)
//
// Every draw is a pure function of (key, counter); no hidden global state.
// Streams with distinct (seed, label, index) keys are independent, so work
// can be parallelized across labels or indices and still produce results
// identical to a sequential run. Labels are stable strings (stage or
// hypothesis names); adding a new stage never perturbs existing streams.
// ---------------------------------------------------------------------------
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::string_view label, std::uint64_t index);

    // Next 64 uniform bits.
    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_unit();

    // Fair coin.
    bool next_bit();

    // Uniform integer in [0, n); n must be positive.
    std::uint64_t next_below(std::uint64_t n);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

namespace detail {
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t mix64(std::uint64_t x);
}  // namespace detail

}  // namespace expaudit
