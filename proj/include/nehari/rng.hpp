#pragma once

#include <cstdint>
#include <cmath>

namespace nehari {

// Counter-based generator: every draw is a pure hash of (seed, stream,
// counter), so parallel consumers with distinct streams produce identical
// sequences regardless of scheduling.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ 0x8f1b'9c6e'5a3d'2e41ull, stream)), counter_(0) {}

    std::uint64_t next_u64() { return mix(key_, ++counter_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // Box-Muller; consumes two draws
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t k, std::uint64_t c) {
        // splitmix64 finalizer applied to a keyed counter
        std::uint64_t z = k + c * 0x9e37'79b9'7f4a'7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58'476d'1ce4'e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d0'49bb'1331'11ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace nehari
