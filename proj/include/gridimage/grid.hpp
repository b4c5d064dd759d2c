#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gridimage/residue_set.hpp"

namespace gridimage {

/// An ordered family (A_1, ..., A_n) of subsets of F_p; the product
/// A_1 x ... x A_n is the domain a linear map is evaluated on.
class GridFamily {
public:
    GridFamily(PrimeModulus mod, std::vector<ResidueSet> sets)
        : mod_(mod), sets_(std::move(sets)) {
        if (sets_.empty()) throw ValueError("grid family needs at least one set");
        for (const auto& s : sets_) {
            if (s.modulus() != mod_) throw ValueError("grid set modulus mismatch");
        }
    }

    static GridFamily intervals(PrimeModulus mod, const std::vector<std::uint32_t>& ks) {
        std::vector<ResidueSet> sets;
        sets.reserve(ks.size());
        for (auto k : ks) sets.push_back(interval_set(mod, k));
        return GridFamily(mod, std::move(sets));
    }

    static GridFamily uniform(PrimeModulus mod, int n, const ResidueSet& s) {
        return GridFamily(mod, std::vector<ResidueSet>(static_cast<std::size_t>(n), s));
    }

    PrimeModulus modulus() const noexcept { return mod_; }
    int arity() const noexcept { return static_cast<int>(sets_.size()); }
    const ResidueSet& set(int i) const { return sets_.at(static_cast<std::size_t>(i)); }
    const std::vector<ResidueSet>& sets() const noexcept { return sets_; }

    std::vector<std::int64_t> sizes() const {
        std::vector<std::int64_t> out;
        out.reserve(sets_.size());
        for (const auto& s : sets_) out.push_back(s.size());
        return out;
    }

    bool all_nonempty() const {
        for (const auto& s : sets_) {
            if (s.empty()) return false;
        }
        return true;
    }

    GridFamily with_set(int i, ResidueSet s) const {
        auto copy = sets_;
        copy.at(static_cast<std::size_t>(i)) = std::move(s);
        return GridFamily(mod_, std::move(copy));
    }

    bool operator==(const GridFamily& other) const {
        return mod_ == other.mod_ && sets_ == other.sets_;
    }
    bool operator!=(const GridFamily& other) const { return !(*this == other); }

private:
    PrimeModulus mod_;
    std::vector<ResidueSet> sets_;
};

} // namespace gridimage
