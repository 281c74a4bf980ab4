// rng.hpp - deterministic keyed random streams.
//
// All randomness in the pipeline derives from one user-supplied seed plus a
// context key (asset, day, minute, purpose tag). Draws for a given key are
// independent of iteration order, so per-asset work can run in parallel
// without changing results.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace llab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_str(const std::string& s) {
    // FNV-1a, then one splitmix round to spread low bits.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

// A tiny counter-based generator: state is a key, successive draws hash an
// incrementing counter. Not cryptographic; plenty for simulation.
class KeyedRng {
public:
    explicit KeyedRng(std::uint64_t seed) : key_(splitmix64(seed)) {}

    KeyedRng fork(std::uint64_t k) const { return KeyedRng(splitmix64(key_ ^ splitmix64(k)), 0); }
    KeyedRng fork(const std::string& tag) const { return fork(hash_str(tag)); }

    std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(++counter_)); }

    // Uniform on [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    double normal() {
        // Box-Muller; draws two uniforms per call, caches nothing.
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // +1 or -1 with equal probability.
    double sign() { return (next_u64() & 1) ? 1.0 : -1.0; }

private:
    KeyedRng(std::uint64_t key, int) : key_(key) {}
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace llab
