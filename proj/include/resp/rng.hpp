#pragma once

// Seeded random streams with explicit, engine-only determinism.
// All sampling helpers are implemented directly on top of the raw 64-bit
// engine output instead of <random> distributions, whose algorithms are
// implementation-defined. Artifacts must be byte-identical across runs,
// so every random draw in the project goes through this class.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace resp {

namespace detail {
// splitmix64: mixes a seed and stream tags into well-distributed engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace detail

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : mixed_seed_(detail::splitmix64(seed)), engine_(mixed_seed_) {}

    // Derives an independent stream from this rng's original seed and a tag.
    // Forking does not advance (or depend on) this rng's draw position.
    Rng fork(std::uint64_t tag) const { return Rng(mixed_seed_ ^ detail::splitmix64(~tag)); }

    static Rng from(std::uint64_t seed, std::uint64_t tag) { return Rng(seed).fork(tag); }

    std::uint64_t next() { return engine_(); }

    // Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in the closed interval [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

    // Standard normal via Box-Muller (no cached second value, so stream
    // position is a pure function of the number of calls).
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Fisher-Yates shuffle (engine-only, unlike std::shuffle).
    template <typename T> void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t mixed_seed_ = 0;
    std::mt19937_64 engine_;
};

} // namespace resp
