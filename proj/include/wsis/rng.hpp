#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace wsis {

// Deterministic, platform-independent PRNG used everywhere randomness is
// needed (weight init, exploration noise, replay sampling, wind synthesis).
// std::mt19937 + std::*_distribution are avoided on purpose: distribution
// implementations differ across standard libraries, and bit-identical output
// across platforms is part of the reproducibility contract.
//
// Generator: xorshift64* (Vigna).  Streams are derived from a master seed and
// a label so independent consumers never share a sequence.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        state_ = splitmix64(seed);
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL; // xorshift state must be nonzero
    }

    // Independent stream identified by (seed, label).
    static Rng stream(std::uint64_t master_seed, std::string_view label) {
        return Rng(master_seed ^ fnv1a64(label));
    }

    // Same as stream() with a per-index suffix, for e.g. per-episode streams.
    static Rng stream(std::uint64_t master_seed, std::string_view label, std::uint64_t index) {
        return Rng(master_seed ^ fnv1a64(label) ^ splitmix64(index));
    }

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    // Uniform in [0, 1), 53 significant bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Irwin-Hall (sum of 12 uniforms minus 6): bounded in
    // (-6, 6), moment-matched, and exactly reproducible everywhere.
    double gaussian() {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) s += uniform();
        return s - 6.0;
    }

    // Uniform integer in [0, n).  Modulo bias is negligible for n << 2^64.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

    // k distinct indices drawn uniformly from [0, n) via partial Fisher-Yates.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        if (k > n) k = n;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + below(n - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    std::uint64_t state_;
};

} // namespace wsis
