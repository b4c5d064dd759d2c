#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "gridimage/matrix.hpp"

namespace gridimage {

/// SplitMix64: tiny, fast, and trivially seedable. Used everywhere a
/// reproducible stream is needed; std::uniform_int_distribution is not
/// portable across standard libraries, so all draws go through bounded().
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, n) by rejection; no modulo bias.
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) throw ValueError("bounded draw from an empty range");
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t state_;
};

/// Independent stream for the index-th work item of a seeded run. O(1),
/// so workers can be assigned any slice of indices without replaying.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    SplitMix64 g(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
    return g.next();
}

/// Random k-subset of {0,...,p-1} via a partial Fisher-Yates shuffle.
inline ResidueSet random_subset(SplitMix64& g, PrimeModulus mod, std::uint32_t k) {
    const std::uint32_t p = mod.value();
    if (k > p) throw ValueError("subset size exceeds p");
    std::vector<std::uint32_t> pool(p);
    std::iota(pool.begin(), pool.end(), 0u);
    ResidueSet s(mod);
    for (std::uint32_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::uint32_t>(g.bounded(p - i));
        std::swap(pool[i], pool[j]);
        s.insert(pool[i]);
    }
    return s;
}

inline ResidueSet random_nonempty_set(SplitMix64& g, PrimeModulus mod) {
    return random_subset(g, mod, 1 + static_cast<std::uint32_t>(g.bounded(mod.value())));
}

inline GridFamily random_grid(SplitMix64& g, PrimeModulus mod,
                              const std::vector<std::int64_t>& shape) {
    std::vector<ResidueSet> sets;
    sets.reserve(shape.size());
    for (auto k : shape) {
        if (k < 1 || k > static_cast<std::int64_t>(mod.value())) {
            throw ValueError("set size out of range");
        }
        sets.push_back(random_subset(g, mod, static_cast<std::uint32_t>(k)));
    }
    return GridFamily(mod, std::move(sets));
}

inline MatrixFp random_matrix(SplitMix64& g, PrimeModulus mod, int rows, int cols) {
    MatrixFp m(mod, rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m.set(i, j, static_cast<std::uint32_t>(g.bounded(mod.value())));
        }
    }
    return m;
}

inline MatrixFp random_invertible_matrix(SplitMix64& g, PrimeModulus mod, int n) {
    for (;;) {
        MatrixFp m = random_matrix(g, mod, n, n);
        if (is_invertible(m)) return m;
    }
}

/// Random m x (m+1) matrix of full row rank.
inline MatrixFp random_full_rank_map(SplitMix64& g, PrimeModulus mod, int m) {
    for (;;) {
        MatrixFp cand = random_matrix(g, mod, m, m + 1);
        if (rank(cand) == m) return cand;
    }
}

} // namespace gridimage
