#pragma once

#include <cstdint>
#include <string>

#include "gridimage/errors.hpp"

namespace gridimage {

/// Largest modulus accepted by default. Keeps a ResidueSet inside one
/// 64-bit word; raise it per-instance only for pure integer formulas.
inline constexpr std::uint32_t kDefaultPrimeCap = 61;

namespace detail {

inline bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

} // namespace detail

/// A validated prime modulus p. All residues handled by this class are
/// canonical representatives in [0, p).
class PrimeModulus {
public:
    explicit PrimeModulus(std::uint32_t p, std::uint32_t cap = kDefaultPrimeCap) : p_(p) {
        if (!detail::is_prime_u32(p)) {
            throw ValueError("modulus " + std::to_string(p) + " is not prime");
        }
        if (p > cap) {
            throw ValueError("modulus " + std::to_string(p) + " exceeds cap " +
                             std::to_string(cap));
        }
    }

    std::uint32_t value() const noexcept { return p_; }

    bool operator==(const PrimeModulus& other) const noexcept { return p_ == other.p_; }
    bool operator!=(const PrimeModulus& other) const noexcept { return p_ != other.p_; }

    std::uint32_t reduce(std::uint64_t x) const noexcept {
        return static_cast<std::uint32_t>(x % p_);
    }

    /// Reduce a possibly negative integer to its canonical representative.
    std::uint32_t reduce_signed(std::int64_t x) const noexcept {
        std::int64_t r = x % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return static_cast<std::uint32_t>(r);
    }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
        std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }

    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept {
        return a >= b ? a - b : a + p_ - b;
    }

    std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : p_ - a; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
        return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p_);
    }

    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept {
        std::uint32_t base = a % p_;
        std::uint32_t acc = 1 % p_;
        while (e > 0) {
            if (e & 1) acc = mul(acc, base);
            base = mul(base, base);
            e >>= 1;
        }
        return acc;
    }

    /// Multiplicative inverse by Fermat; rejects zero.
    std::uint32_t inv(std::uint32_t a) const {
        if (a % p_ == 0) throw ValueError("inverse of zero mod " + std::to_string(p_));
        return pow(a, p_ - 2);
    }

private:
    std::uint32_t p_;
};

namespace detail {

inline std::uint64_t low_mask(std::uint32_t width) noexcept {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

/// Rotate the low p bits of w left by s positions (0 <= s < p <= 61).
inline std::uint64_t rotl_mod(std::uint64_t w, std::uint32_t s, std::uint32_t p) noexcept {
    if (s == 0) return w;
    return ((w << s) | (w >> (p - s))) & low_mask(p);
}

} // namespace detail

} // namespace gridimage
