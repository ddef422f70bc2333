#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace sfflab {

// splitmix64 step; used both for seeding and for hashing seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stable sub-stream seed from (master, tag, i, j). Realization i of a sweep
// uses subseed(master, "disorder", i); shot block b of realization i uses
// subseed(master, "shots", i, b). Independent of thread scheduling.
inline std::uint64_t subseed(std::uint64_t master, std::string_view tag,
                             std::uint64_t i, std::uint64_t j = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s) ^ fnv1a64(tag);
    h = splitmix64(h) ^ (i * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(h) ^ (j * 0xd1342543de82ef95ULL);
    return splitmix64(h);
}

// xoshiro256** (Blackman/Vigna), seeded through splitmix64. Chosen over
// std::mt19937 because the standard leaves distribution outputs
// implementation-defined; this generator plus the explicit converters below
// is bit-portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal via Box-Muller (explicit formula keeps the stream portable)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace sfflab
