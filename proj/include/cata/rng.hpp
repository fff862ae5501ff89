#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace cata {

// Deterministic splittable random stream. Each replicate of a resampling run
// gets its own stream derived from (seed, replicate index), so results do
// not depend on evaluation order and parallel runs agree with serial ones
// bit for bit. The core generator is SplitMix64.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    static RandomStream for_replicate(std::uint64_t seed, std::uint64_t replicate) {
        // decorrelate the per-replicate seeds with one extra mixing round
        RandomStream mixer(seed ^ (0x9e3779b97f4a7c15ULL * (replicate + 1)));
        return RandomStream(mixer.next_u64());
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform index in [0, n), rejection-sampled so every index is equally
    // likely regardless of n
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<std::size_t>(v % bound);
    }

    // standard normal via Box-Muller
    double normal() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Fisher-Yates shuffle of an index vector
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace cata
