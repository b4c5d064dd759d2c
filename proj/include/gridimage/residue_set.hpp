#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "gridimage/fp.hpp"

namespace gridimage {

/// A subset of F_p stored as a characteristic bit vector in one machine
/// word (bit r = residue r). Immutable value semantics: every operation
/// returns a new set.
class ResidueSet {
public:
    explicit ResidueSet(PrimeModulus mod) : mod_(mod), bits_(0) { check_word(mod); }

    static ResidueSet from_bits(PrimeModulus mod, std::uint64_t bits) {
        ResidueSet s(mod);
        if (bits & ~detail::low_mask(mod.value())) {
            throw ValueError("bit set contains residues outside [0, p)");
        }
        s.bits_ = bits;
        return s;
    }

    static ResidueSet of(PrimeModulus mod, std::initializer_list<std::uint32_t> rs) {
        ResidueSet s(mod);
        for (auto r : rs) s.insert(r);
        return s;
    }

    static ResidueSet full(PrimeModulus mod) {
        return from_bits(mod, detail::low_mask(mod.value()));
    }

    PrimeModulus modulus() const noexcept { return mod_; }
    std::uint64_t bits() const noexcept { return bits_; }
    bool empty() const noexcept { return bits_ == 0; }
    int size() const noexcept { return std::popcount(bits_); }

    bool contains(std::uint32_t r) const {
        check_residue(r);
        return (bits_ >> r) & 1;
    }

    void insert(std::uint32_t r) {
        check_residue(r);
        bits_ |= std::uint64_t{1} << r;
    }

    void erase(std::uint32_t r) {
        check_residue(r);
        bits_ &= ~(std::uint64_t{1} << r);
    }

    /// Members in ascending order.
    std::vector<std::uint32_t> members() const {
        std::vector<std::uint32_t> out;
        out.reserve(static_cast<std::size_t>(size()));
        std::uint64_t w = bits_;
        while (w) {
            out.push_back(static_cast<std::uint32_t>(std::countr_zero(w)));
            w &= w - 1;
        }
        return out;
    }

    bool operator==(const ResidueSet& other) const noexcept {
        return mod_ == other.mod_ && bits_ == other.bits_;
    }
    bool operator!=(const ResidueSet& other) const noexcept { return !(*this == other); }

private:
    static void check_word(PrimeModulus mod) {
        if (mod.value() > 61) {
            throw ValueError("residue sets require p <= 61 (one-word representation)");
        }
    }
    void check_residue(std::uint32_t r) const {
        if (r >= mod_.value()) {
            throw ValueError("residue " + std::to_string(r) + " out of range for p=" +
                             std::to_string(mod_.value()));
        }
    }

    PrimeModulus mod_;
    std::uint64_t bits_;
};

namespace detail {

inline void require_same_modulus(const ResidueSet& a, const ResidueSet& b) {
    if (a.modulus() != b.modulus()) {
        throw ValueError("modulus mismatch: p=" + std::to_string(a.modulus().value()) +
                         " vs p=" + std::to_string(b.modulus().value()));
    }
}

} // namespace detail

/// A + B = { a + b mod p }. Empty if either input is empty.
inline ResidueSet sumset(const ResidueSet& a, const ResidueSet& b) {
    detail::require_same_modulus(a, b);
    const std::uint32_t p = a.modulus().value();
    std::uint64_t acc = 0;
    std::uint64_t w = b.bits();
    while (w) {
        const auto shift = static_cast<std::uint32_t>(std::countr_zero(w));
        acc |= detail::rotl_mod(a.bits(), shift, p);
        w &= w - 1;
    }
    return ResidueSet::from_bits(a.modulus(), acc);
}

/// d * A for a nonzero scalar d; a bijection, so the size is preserved.
inline ResidueSet dilate(const ResidueSet& a, std::uint32_t d) {
    const PrimeModulus mod = a.modulus();
    if (d % mod.value() == 0) throw ValueError("dilation by zero is not invertible");
    ResidueSet out(mod);
    for (auto r : a.members()) out.insert(mod.mul(r, d));
    return out;
}

/// A + c, elementwise translation.
inline ResidueSet translate(const ResidueSet& a, std::uint32_t c) {
    return ResidueSet::from_bits(
        a.modulus(), detail::rotl_mod(a.bits(), c % a.modulus().value(), a.modulus().value()));
}

/// -A = { p - a mod p }.
inline ResidueSet negate(const ResidueSet& a) {
    const std::uint32_t p = a.modulus().value();
    std::uint64_t out = a.bits() & 1; // 0 is its own negation
    std::uint64_t w = a.bits() & ~std::uint64_t{1};
    while (w) {
        const auto r = static_cast<std::uint32_t>(std::countr_zero(w));
        out |= std::uint64_t{1} << (p - r);
        w &= w - 1;
    }
    return ResidueSet::from_bits(a.modulus(), out);
}

/// min(|A| + |B| - 1, p); defined only for nonempty sizes.
inline std::int64_t cd_lower_bound(std::int64_t a_size, std::int64_t b_size, PrimeModulus p) {
    const auto pv = static_cast<std::int64_t>(p.value());
    if (a_size < 1 || a_size > pv || b_size < 1 || b_size > pv) {
        throw ValueError("set sizes must lie in [1, p]");
    }
    return std::min(a_size + b_size - 1, pv);
}

/// The interval {0, 1, ..., k-1}.
inline ResidueSet interval_set(PrimeModulus p, std::uint32_t k) {
    if (k < 1 || k > p.value()) {
        throw ValueError("interval length " + std::to_string(k) + " out of range for p=" +
                         std::to_string(p.value()));
    }
    return ResidueSet::from_bits(p, detail::low_mask(k));
}

} // namespace gridimage
