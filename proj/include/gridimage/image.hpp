#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "gridimage/matrix.hpp"

namespace gridimage {

/// Hard ceiling on p^m, the number of cells an ImageSet may address.
/// 2^30 bits is 128 MiB of characteristic vector.
inline constexpr std::uint64_t kDefaultCellCap = std::uint64_t{1} << 30;

/// p^m with an overflow check; the cap argument only shapes the error text.
inline std::uint64_t required_cells(std::uint32_t p, int m,
                                    std::uint64_t cap = kDefaultCellCap) {
    if (m < 0) throw ValueError("negative dimension");
    unsigned __int128 cells = 1;
    for (int i = 0; i < m; ++i) {
        cells *= p;
        if (cells > (static_cast<unsigned __int128>(1) << 62)) {
            throw CapError("p^m exceeds " + std::to_string(cap) + " cells");
        }
    }
    return static_cast<std::uint64_t>(cells);
}

/// Subset of F_p^m as a characteristic bit vector. Point (y_1,...,y_m)
/// lives at index sum y_i * p^{i-1}: the first coordinate is the least
/// significant digit, so serialized indices are stable by construction.
class ImageSet {
public:
    ImageSet(PrimeModulus mod, int m, std::uint64_t cap = kDefaultCellCap)
        : mod_(mod), dim_(m), cells_(required_cells(mod.value(), m, cap)) {
        if (m < 1) throw ValueError("image dimension must be at least 1");
        if (cells_ > cap) {
            throw CapError("p^m = " + std::to_string(cells_) + " cells exceeds cap " +
                           std::to_string(cap));
        }
        words_.assign(static_cast<std::size_t>((cells_ + 63) / 64), 0);
    }

    PrimeModulus modulus() const noexcept { return mod_; }
    int dim() const noexcept { return dim_; }
    std::uint64_t cells() const noexcept { return cells_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    void set(std::uint64_t index) {
        words_[static_cast<std::size_t>(index >> 6)] |= std::uint64_t{1} << (index & 63);
    }

    bool test(std::uint64_t index) const {
        return (words_[static_cast<std::size_t>(index >> 6)] >> (index & 63)) & 1;
    }

    /// OR a bit word of the given width into the vector starting at a bit
    /// offset. Used by the star fast path to stamp whole residue rows.
    void or_word_at(std::uint64_t bit_offset, std::uint64_t word) {
        const std::size_t w = static_cast<std::size_t>(bit_offset >> 6);
        const unsigned shift = static_cast<unsigned>(bit_offset & 63);
        words_[w] |= word << shift;
        if (shift != 0) {
            const std::uint64_t hi = word >> (64 - shift);
            if (hi != 0) words_[w + 1] |= hi;
        }
    }

    std::int64_t size() const {
        std::int64_t n = 0;
        for (auto w : words_) n += std::popcount(w);
        return n;
    }

    bool empty() const {
        for (auto w : words_) {
            if (w != 0) return false;
        }
        return true;
    }

    std::vector<std::uint64_t> indices() const {
        std::vector<std::uint64_t> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const int b = std::countr_zero(bits);
                out.push_back((static_cast<std::uint64_t>(w) << 6) + static_cast<unsigned>(b));
                bits &= bits - 1;
            }
        }
        return out;
    }

    std::uint64_t encode(const std::vector<std::uint32_t>& point) const {
        if (static_cast<int>(point.size()) != dim_) throw ValueError("point dimension mismatch");
        std::uint64_t idx = 0;
        for (int i = dim_; i-- > 0;) {
            if (point[static_cast<std::size_t>(i)] >= mod_.value()) {
                throw ValueError("point coordinate out of range");
            }
            idx = idx * mod_.value() + point[static_cast<std::size_t>(i)];
        }
        return idx;
    }

    std::vector<std::uint32_t> decode(std::uint64_t index) const {
        if (index >= cells_) throw ValueError("point index out of range");
        std::vector<std::uint32_t> point(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) {
            point[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(index % mod_.value());
            index /= mod_.value();
        }
        return point;
    }

    void merge_or(const ImageSet& other) {
        if (mod_ != other.mod_ || dim_ != other.dim_) throw ValueError("image shape mismatch");
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    }

    bool operator==(const ImageSet& other) const {
        return mod_ == other.mod_ && dim_ == other.dim_ && words_ == other.words_;
    }
    bool operator!=(const ImageSet& other) const { return !(*this == other); }

private:
    PrimeModulus mod_;
    int dim_;
    std::uint64_t cells_;
    std::vector<std::uint64_t> words_;
};

namespace detail {

inline void check_image_inputs(const MatrixFp& m, const GridFamily& grid) {
    if (m.modulus() != grid.modulus()) throw ValueError("modulus mismatch");
    if (grid.arity() != m.cols()) throw ValueError("grid arity does not match matrix columns");
    if (!grid.all_nonempty()) throw ValueError("image of a grid with an empty set");
}

/// Leaf-level walk: all coordinates except the last are fixed by `partial`;
/// mark M(x) for every member of `last` drawn from `slice`.
struct ImageDfs {
    const MatrixFp& m;
    const GridFamily& grid;
    const std::vector<std::uint64_t>& pow_p;
    const std::vector<std::uint32_t>* slice; // members allowed at the last coordinate
    ImageSet* out;

    void run(int depth, std::vector<std::uint32_t>& partial) {
        const std::uint32_t p = m.modulus().value();
        const int n = m.cols();
        if (depth == n - 1) {
            for (std::uint32_t x : *slice) {
                std::uint64_t idx = 0;
                for (int i = 0; i < m.rows(); ++i) {
                    const std::uint64_t y =
                        partial[static_cast<std::size_t>(i)] +
                        static_cast<std::uint64_t>(m.at(i, depth)) * x;
                    idx += (y % p) * pow_p[static_cast<std::size_t>(i)];
                }
                out->set(idx);
            }
            return;
        }
        std::vector<std::uint32_t> next(partial.size());
        for (std::uint32_t x : grid.set(depth).members()) {
            for (int i = 0; i < m.rows(); ++i) {
                next[static_cast<std::size_t>(i)] = m.modulus().reduce(
                    partial[static_cast<std::size_t>(i)] +
                    static_cast<std::uint64_t>(m.at(i, depth)) * x);
            }
            run(depth + 1, next);
        }
    }
};

} // namespace detail

/// Exact image of M on the grid. Depth-first over coordinates in ascending
/// index, residues ascending; with several workers the members of the last
/// coordinate are split into contiguous slices, each marked into a private
/// ImageSet and OR-merged, so the result never depends on the worker count.
inline ImageSet image(const MatrixFp& m, const GridFamily& grid, int workers = 1,
                      std::uint64_t cap = kDefaultCellCap) {
    detail::check_image_inputs(m, grid);
    if (workers < 1) throw ValueError("worker count must be positive");
    const std::uint32_t p = m.modulus().value();
    std::vector<std::uint64_t> pow_p(static_cast<std::size_t>(m.rows()), 1);
    for (std::size_t i = 1; i < pow_p.size(); ++i) pow_p[i] = pow_p[i - 1] * p;

    const auto last_members = grid.set(m.cols() - 1).members();
    const int lanes = std::min<int>(workers, static_cast<int>(last_members.size()));

    auto run_slice = [&](const std::vector<std::uint32_t>& slice, ImageSet* out) {
        std::vector<std::uint32_t> partial(static_cast<std::size_t>(m.rows()), 0);
        detail::ImageDfs dfs{m, grid, pow_p, &slice, out};
        dfs.run(0, partial);
    };

    ImageSet result(m.modulus(), m.rows(), cap);
    if (lanes <= 1) {
        run_slice(last_members, &result);
        return result;
    }

    std::vector<std::vector<std::uint32_t>> slices(static_cast<std::size_t>(lanes));
    for (std::size_t i = 0; i < last_members.size(); ++i) {
        slices[i * static_cast<std::size_t>(lanes) / last_members.size()].push_back(
            last_members[i]);
    }
    std::vector<ImageSet> partials(static_cast<std::size_t>(lanes),
                                   ImageSet(m.modulus(), m.rows(), cap));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(lanes));
    for (int t = 0; t < lanes; ++t) {
        pool.emplace_back(run_slice, std::cref(slices[static_cast<std::size_t>(t)]),
                          &partials[static_cast<std::size_t>(t)]);
    }
    for (auto& th : pool) th.join();
    for (const auto& part : partials) result.merge_or(part);
    return result;
}

/// Image of the map (x_1,...,x_n) -> (x_1+x_n, ..., x_{n-1}+x_n):
/// the union over z in A_n of the shifted boxes (A_1+z) x ... x (A_{n-1}+z),
/// stamped p residues at a time with the first coordinate's bit word.
inline ImageSet star_image_fast(const GridFamily& grid, std::uint64_t cap = kDefaultCellCap) {
    if (grid.arity() < 2) throw ValueError("star map needs at least two coordinates");
    if (!grid.all_nonempty()) throw ValueError("image of a grid with an empty set");
    const PrimeModulus mod = grid.modulus();
    const std::uint32_t p = mod.value();
    const int m = grid.arity() - 1;
    ImageSet out(mod, m, cap);

    std::vector<std::uint64_t> pow_p(static_cast<std::size_t>(m), 1);
    for (std::size_t i = 1; i < pow_p.size(); ++i) pow_p[i] = pow_p[i - 1] * p;

    std::vector<std::uint64_t> shifted(static_cast<std::size_t>(m));
    // walk coordinates m-1 .. 1 over the members of the shifted sets,
    // then stamp the whole first-coordinate word at the accumulated offset
    auto dfs = [&](auto&& self, int coord, std::uint64_t offset) -> void {
        if (coord == 0) {
            out.or_word_at(offset, shifted[0]);
            return;
        }
        std::uint64_t bits = shifted[static_cast<std::size_t>(coord)];
        while (bits != 0) {
            const auto y = static_cast<std::uint32_t>(std::countr_zero(bits));
            bits &= bits - 1;
            self(self, coord - 1, offset + y * pow_p[static_cast<std::size_t>(coord)]);
        }
    };

    for (std::uint32_t z : grid.set(grid.arity() - 1).members()) {
        for (int i = 0; i < m; ++i) {
            shifted[static_cast<std::size_t>(i)] =
                detail::rotl_mod(grid.set(i).bits(), z, p);
        }
        dfs(dfs, m - 1, 0);
    }
    return out;
}

/// |image|; recognizes the star matrix by its exact entry pattern and takes
/// the fast path in that case.
inline std::int64_t image_size(const MatrixFp& m, const GridFamily& grid, int workers = 1,
                               std::uint64_t cap = kDefaultCellCap) {
    if (is_star_matrix(m)) {
        detail::check_image_inputs(m, grid);
        return star_image_fast(grid, cap).size();
    }
    return image(m, grid, workers, cap).size();
}

/// t_a for a in F_p: how many ways a splits as x + y with x in X, y in Y.
struct FiberProfile {
    std::vector<std::int64_t> counts;

    std::int64_t total() const {
        std::int64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
};

inline FiberProfile fiber_counts(const ResidueSet& x, const ResidueSet& y) {
    if (x.modulus() != y.modulus()) throw ValueError("modulus mismatch");
    const std::uint32_t p = x.modulus().value();
    const std::uint64_t neg_x = negate(x).bits();
    FiberProfile profile;
    profile.counts.resize(p);
    for (std::uint32_t a = 0; a < p; ++a) {
        profile.counts[a] = std::popcount(y.bits() & detail::rotl_mod(neg_x, a, p));
    }
    return profile;
}

} // namespace gridimage
