#include "expaudit/rng.hpp"

namespace expaudit {

namespace detail {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// SplitMix64 finalizer. Full 64-bit avalanche.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

CounterRng::CounterRng(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    std::uint64_t k = detail::mix64(seed);
    k = detail::mix64(k ^ detail::fnv1a64(label));
    k = detail::mix64(k ^ index);
    key_ = k;
}

std::uint64_t CounterRng::next_u64() {
    return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool CounterRng::next_bit() {
    return (next_u64() >> 63) != 0;
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
    // Rejection sampling on the top bits keeps the draw unbiased.
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
}

}  // namespace expaudit
