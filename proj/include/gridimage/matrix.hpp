#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridimage/grid.hpp"

namespace gridimage {

/// An m x n matrix over F_p, row-major, entries canonical in [0, p).
class MatrixFp {
public:
    MatrixFp(PrimeModulus mod, int rows, int cols)
        : mod_(mod), rows_(rows), cols_(cols),
          entries_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {
        if (rows < 1 || cols < 1) throw ValueError("matrix dimensions must be positive");
    }

    static MatrixFp from_rows(PrimeModulus mod,
                              const std::vector<std::vector<std::uint32_t>>& rows) {
        if (rows.empty() || rows.front().empty()) {
            throw ValueError("matrix literal must have at least one row and column");
        }
        MatrixFp m(mod, static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size()) {
                throw ValueError("ragged matrix literal");
            }
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                m.set(static_cast<int>(i), static_cast<int>(j), mod.reduce(rows[i][j]));
            }
        }
        return m;
    }

    static MatrixFp identity(PrimeModulus mod, int n) {
        MatrixFp m(mod, n, n);
        for (int i = 0; i < n; ++i) m.set(i, i, 1);
        return m;
    }

    PrimeModulus modulus() const noexcept { return mod_; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    std::uint32_t at(int i, int j) const { return entries_[index(i, j)]; }
    void set(int i, int j, std::uint32_t v) { entries_[index(i, j)] = v % mod_.value(); }

    std::vector<std::vector<std::uint32_t>> row_vectors() const {
        std::vector<std::vector<std::uint32_t>> out(static_cast<std::size_t>(rows_));
        for (int i = 0; i < rows_; ++i) {
            out[static_cast<std::size_t>(i)].assign(
                entries_.begin() + static_cast<std::ptrdiff_t>(index(i, 0)),
                entries_.begin() + static_cast<std::ptrdiff_t>(index(i, 0)) + cols_);
        }
        return out;
    }

    std::vector<std::uint32_t> column(int j) const {
        std::vector<std::uint32_t> out(static_cast<std::size_t>(rows_));
        for (int i = 0; i < rows_; ++i) out[static_cast<std::size_t>(i)] = at(i, j);
        return out;
    }

    void swap_columns(int i, int j) {
        for (int r = 0; r < rows_; ++r) {
            std::swap(entries_[index(r, i)], entries_[index(r, j)]);
        }
    }

    std::vector<std::uint32_t> apply(const std::vector<std::uint32_t>& x) const {
        if (static_cast<int>(x.size()) != cols_) throw ValueError("vector length mismatch");
        std::vector<std::uint32_t> y(static_cast<std::size_t>(rows_), 0);
        for (int i = 0; i < rows_; ++i) {
            std::uint64_t acc = 0;
            for (int j = 0; j < cols_; ++j) {
                acc += static_cast<std::uint64_t>(at(i, j)) * x[static_cast<std::size_t>(j)];
            }
            y[static_cast<std::size_t>(i)] = mod_.reduce(acc);
        }
        return y;
    }

    bool operator==(const MatrixFp& other) const {
        return mod_ == other.mod_ && rows_ == other.rows_ && cols_ == other.cols_ &&
               entries_ == other.entries_;
    }
    bool operator!=(const MatrixFp& other) const { return !(*this == other); }

private:
    std::size_t index(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
            throw ValueError("matrix index (" + std::to_string(i) + "," + std::to_string(j) +
                             ") out of range");
        }
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(j);
    }

    PrimeModulus mod_;
    int rows_;
    int cols_;
    std::vector<std::uint32_t> entries_;
};

inline MatrixFp matmul(const MatrixFp& a, const MatrixFp& b) {
    if (a.modulus() != b.modulus()) throw ValueError("matrix modulus mismatch");
    if (a.cols() != b.rows()) throw ValueError("matrix shape mismatch in product");
    const PrimeModulus mod = a.modulus();
    MatrixFp c(mod, a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            std::uint64_t acc = 0;
            for (int k = 0; k < a.cols(); ++k) {
                acc += static_cast<std::uint64_t>(a.at(i, k)) * b.at(k, j);
            }
            c.set(i, j, mod.reduce(acc));
        }
    }
    return c;
}

namespace detail {

/// Reduced row echelon form in place; returns the pivot column per row.
inline std::vector<int> rref_in_place(MatrixFp& m) {
    const PrimeModulus mod = m.modulus();
    std::vector<int> pivot_cols;
    int pivot_row = 0;
    for (int col = 0; col < m.cols() && pivot_row < m.rows(); ++col) {
        int sel = -1;
        for (int r = pivot_row; r < m.rows(); ++r) {
            if (m.at(r, col) != 0) { sel = r; break; }
        }
        if (sel < 0) continue;
        if (sel != pivot_row) {
            for (int j = 0; j < m.cols(); ++j) {
                const auto tmp = m.at(sel, j);
                m.set(sel, j, m.at(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
        }
        const std::uint32_t scale = mod.inv(m.at(pivot_row, col));
        for (int j = 0; j < m.cols(); ++j) {
            m.set(pivot_row, j, mod.mul(m.at(pivot_row, j), scale));
        }
        for (int r = 0; r < m.rows(); ++r) {
            if (r == pivot_row) continue;
            const std::uint32_t f = m.at(r, col);
            if (f == 0) continue;
            for (int j = 0; j < m.cols(); ++j) {
                m.set(r, j, mod.sub(m.at(r, j), mod.mul(f, m.at(pivot_row, j))));
            }
        }
        pivot_cols.push_back(col);
        ++pivot_row;
    }
    return pivot_cols;
}

} // namespace detail

/// Rank over F_p by Gaussian elimination.
inline int rank(const MatrixFp& m) {
    MatrixFp copy = m;
    return static_cast<int>(detail::rref_in_place(copy).size());
}

inline bool is_invertible(const MatrixFp& m) {
    return m.rows() == m.cols() && rank(m) == m.rows();
}

/// Inverse of a square matrix; throws ValueError if singular.
inline MatrixFp inverse(const MatrixFp& m) {
    if (m.rows() != m.cols()) throw ValueError("only square matrices have inverses");
    const int n = m.rows();
    MatrixFp aug(m.modulus(), n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug.set(i, j, m.at(i, j));
        aug.set(i, n + i, 1);
    }
    const auto pivots = detail::rref_in_place(aug);
    if (static_cast<int>(pivots.size()) != n || pivots.back() >= n) {
        throw ValueError("matrix is singular");
    }
    MatrixFp inv(m.modulus(), n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) inv.set(i, j, aug.at(i, n + j));
    }
    return inv;
}

/// Kernel of a map together with its distinguished min-support vector.
///
/// For nullity 1 the vector is the unique generator scaled so its first
/// nonzero entry is 1; its support is shared by every nonzero kernel
/// vector. For nullity >= 2 the vector minimizes support size, with ties
/// broken by the lexicographically smallest support index set and then
/// the lexicographically smallest coordinate sequence.
struct KernelDescription {
    std::vector<std::vector<std::uint32_t>> basis;
    std::optional<std::vector<std::uint32_t>> min_support_vector;
    std::vector<int> support;    // 0-based column indices, ascending
    std::vector<int> co_support; // complement of support in [0, n)
};

namespace detail {

inline std::vector<int> support_of(const std::vector<std::uint32_t>& v) {
    std::vector<int> s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0) s.push_back(static_cast<int>(i));
    }
    return s;
}

inline std::vector<std::uint32_t> scale_first_nonzero_to_one(std::vector<std::uint32_t> v,
                                                             PrimeModulus mod) {
    for (auto x : v) {
        if (x != 0) {
            const std::uint32_t s = mod.inv(x);
            for (auto& y : v) y = mod.mul(y, s);
            break;
        }
    }
    return v;
}

} // namespace detail

inline KernelDescription kernel_basis(const MatrixFp& m) {
    const PrimeModulus mod = m.modulus();
    MatrixFp r = m;
    const auto pivots = detail::rref_in_place(r);
    std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
    for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;

    KernelDescription out;
    for (int f = 0; f < m.cols(); ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        std::vector<std::uint32_t> v(static_cast<std::size_t>(m.cols()), 0);
        v[static_cast<std::size_t>(f)] = 1;
        for (std::size_t pr = 0; pr < pivots.size(); ++pr) {
            v[static_cast<std::size_t>(pivots[pr])] =
                mod.neg(r.at(static_cast<int>(pr), f));
        }
        out.basis.push_back(std::move(v));
    }

    const std::size_t nullity = out.basis.size();
    if (nullity == 1) {
        out.min_support_vector = detail::scale_first_nonzero_to_one(out.basis[0], mod);
    } else if (nullity >= 2) {
        // Exhaustive scan over projective representatives (first nonzero
        // coefficient fixed to 1); feasible at the dimensions this library
        // targets. Falls back to the sparsest basis vector when the kernel
        // is too large to scan.
        const double log_count = static_cast<double>(nullity) *
                                 std::log2(static_cast<double>(mod.value()));
        std::optional<std::vector<std::uint32_t>> best;
        std::vector<int> best_support;
        auto consider = [&](const std::vector<std::uint32_t>& cand) {
            auto s = detail::support_of(cand);
            if (!best || s.size() < best_support.size() ||
                (s.size() == best_support.size() &&
                 (s < best_support || (s == best_support && cand < *best)))) {
                best = cand;
                best_support = std::move(s);
            }
        };
        if (log_count <= 22.0) {
            const std::uint32_t p = mod.value();
            std::vector<std::uint32_t> coeff(nullity, 0);
            // iterate coefficient vectors whose first nonzero entry is 1
            for (std::size_t lead = 0; lead < nullity; ++lead) {
                std::fill(coeff.begin(), coeff.end(), 0);
                coeff[lead] = 1;
                bool done = false;
                while (!done) {
                    std::vector<std::uint32_t> v(static_cast<std::size_t>(m.cols()), 0);
                    for (std::size_t b = lead; b < nullity; ++b) {
                        if (coeff[b] == 0) continue;
                        for (std::size_t j = 0; j < v.size(); ++j) {
                            v[j] = mod.add(v[j], mod.mul(coeff[b], out.basis[b][j]));
                        }
                    }
                    consider(detail::scale_first_nonzero_to_one(std::move(v), mod));
                    done = true;
                    for (std::size_t b = nullity; b-- > lead + 1;) {
                        if (++coeff[b] < p) { done = false; break; }
                        coeff[b] = 0;
                    }
                }
            }
        } else {
            for (const auto& b : out.basis) {
                consider(detail::scale_first_nonzero_to_one(b, mod));
            }
        }
        out.min_support_vector = std::move(best);
    }

    if (out.min_support_vector) {
        out.support = detail::support_of(*out.min_support_vector);
    }
    std::vector<bool> in_support(static_cast<std::size_t>(m.cols()), false);
    for (int i : out.support) in_support[static_cast<std::size_t>(i)] = true;
    for (int i = 0; i < m.cols(); ++i) {
        if (!in_support[static_cast<std::size_t>(i)]) out.co_support.push_back(i);
    }
    return out;
}

/// R * M for an invertible row multiplier R. The grid is untouched and
/// the image size is preserved.
inline MatrixFp row_transform(const MatrixFp& m, const MatrixFp& r) {
    if (r.rows() != m.rows() || r.cols() != m.rows()) {
        throw ValueError("row multiplier must be m x m");
    }
    if (!is_invertible(r)) throw ValueError("row multiplier is singular");
    return matmul(r, m);
}

/// Scale column i by d and replace A_i by d^{-1} A_i. The image of the
/// pair is literally unchanged.
inline std::pair<MatrixFp, GridFamily> column_scale(const MatrixFp& m, const GridFamily& grid,
                                                    int i, std::uint32_t d) {
    if (grid.arity() != m.cols()) throw ValueError("grid arity does not match matrix columns");
    if (i < 0 || i >= m.cols()) throw ValueError("column index out of range");
    const PrimeModulus mod = m.modulus();
    if (d % mod.value() == 0) throw ValueError("column scale by zero is not invertible");
    MatrixFp out = m;
    for (int r = 0; r < m.rows(); ++r) out.set(r, i, mod.mul(m.at(r, i), d));
    return {std::move(out), grid.with_set(i, dilate(grid.set(i), mod.inv(d)))};
}

/// Swap columns i and j together with the sets A_i and A_j; the image is
/// identical, not merely equal in size.
inline std::pair<MatrixFp, GridFamily> column_swap(const MatrixFp& m, const GridFamily& grid,
                                                   int i, int j) {
    if (grid.arity() != m.cols()) throw ValueError("grid arity does not match matrix columns");
    if (i < 0 || i >= m.cols() || j < 0 || j >= m.cols()) {
        throw ValueError("column index out of range");
    }
    if (i == j) throw ValueError("column swap requires distinct indices");
    MatrixFp out = m;
    out.swap_columns(i, j);
    GridFamily g = grid.with_set(i, grid.set(j)).with_set(j, grid.set(i));
    return {std::move(out), std::move(g)};
}

/// The map (x_1, ..., x_n) -> (x_1 + x_n, ..., x_{n-1} + x_n): an
/// (n-1) x n matrix [I | 1].
inline MatrixFp star_matrix(PrimeModulus mod, int n) {
    if (n < 2) throw ValueError("star map needs at least two coordinates");
    MatrixFp m(mod, n - 1, n);
    for (int i = 0; i < n - 1; ++i) {
        m.set(i, i, 1);
        m.set(i, n - 1, 1);
    }
    return m;
}

inline bool is_star_matrix(const MatrixFp& m) {
    if (m.cols() != m.rows() + 1) return false;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            const std::uint32_t want = (j == i || j == m.cols() - 1) ? 1u : 0u;
            if (m.at(i, j) != want) return false;
        }
    }
    return true;
}

} // namespace gridimage
