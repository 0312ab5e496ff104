// Seeded, independent random streams. Every Monte Carlo site derives its own
// stream from the global seed plus a tag tuple (entry, stage, order, chunk),
// so results do not depend on scheduling.

#pragma once

#include <cstdint>

namespace sbdyn {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256** scrambler on a splitmix-expanded state
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x++);
    }

    template <typename... Tags>
    static RngStream keyed(std::uint64_t seed, Tags... tags) {
        std::uint64_t x = splitmix64(seed);
        ((x = splitmix64(x ^ static_cast<std::uint64_t>(tags))), ...);
        return RngStream(x);
    }

    std::uint64_t next() {
        std::uint64_t* s = state_;
        std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform in {0, ..., n-1}, rejection sampled
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace sbdyn
