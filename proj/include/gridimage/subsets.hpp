#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "gridimage/errors.hpp"

namespace gridimage {

/// C(n, k) for n <= 64; every such value fits in a uint64_t.
inline std::uint64_t binomial(int n, int k) {
    if (n < 0 || n > 64) throw ValueError("binomial defined here only for 0 <= n <= 64");
    if (k < 0 || k > n) return 0;
    static const auto table = [] {
        std::array<std::array<std::uint64_t, 65>, 65> t{};
        for (int i = 0; i <= 64; ++i) {
            t[static_cast<std::size_t>(i)][0] = 1;
            for (int j = 1; j <= i; ++j) {
                t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    t[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
                    t[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
            }
        }
        return t;
    }();
    return table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// First k-subset in colexicographic order: the k lowest elements.
inline std::uint64_t first_colex_mask(int k) {
    if (k < 0 || k > 63) throw ValueError("subset size out of range");
    return (std::uint64_t{1} << k) - 1;
}

/// Last k-subset of a p-element universe: the k highest elements.
inline std::uint64_t last_colex_mask(int p, int k) {
    if (k < 0 || k > p || p > 63) throw ValueError("subset size out of range");
    return first_colex_mask(k) << (p - k);
}

/// Next k-subset in colexicographic order (Gosper's hack: the next larger
/// integer with the same popcount). Caller stops at last_colex_mask.
inline std::uint64_t next_colex_mask(std::uint64_t v) {
    if (v == 0) throw ValueError("empty mask has no successor");
    const std::uint64_t t = v | (v - 1);
    return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

/// Position of a k-subset in colex order: sum over the i-th smallest
/// element c_i (1-indexed i) of C(c_i, i).
inline std::uint64_t colex_rank(std::uint64_t mask) {
    std::uint64_t r = 0;
    int i = 1;
    while (mask != 0) {
        const int c = std::countr_zero(mask);
        mask &= mask - 1;
        r += binomial(c, i);
        ++i;
    }
    return r;
}

/// Inverse of colex_rank for k-subsets.
inline std::uint64_t colex_unrank(int k, std::uint64_t rank) {
    std::uint64_t mask = 0;
    for (int i = k; i >= 1; --i) {
        int c = i - 1;
        while (binomial(c + 1, i) <= rank) ++c;
        rank -= binomial(c, i);
        mask |= std::uint64_t{1} << c;
    }
    if (rank != 0) throw ValueError("rank out of range for subset size");
    return mask;
}

} // namespace gridimage
