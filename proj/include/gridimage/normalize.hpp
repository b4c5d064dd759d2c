#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gridimage/matrix.hpp"

namespace gridimage {

struct ColumnSwapRecord {
    int i = 0;
    int j = 0;
    bool operator==(const ColumnSwapRecord&) const = default;
};

struct RowMultiplierRecord {
    MatrixFp multiplier;
    bool operator==(const RowMultiplierRecord&) const = default;
};

struct ColumnScaleRecord {
    int column = 0;
    std::uint32_t scalar = 1;
    bool operator==(const ColumnScaleRecord&) const = default;
};

using TransformRecord = std::variant<ColumnSwapRecord, RowMultiplierRecord, ColumnScaleRecord>;

/// Outcome of reducing an m x (m+1) rank-m map to the simple form:
/// first column in {0,1}^m, last m columns the identity.
struct NormalizationResult {
    MatrixFp canonical;
    GridFamily transformed_grid;
    std::vector<int> first_column_ones; // 0-based rows whose first entry is 1
    std::vector<TransformRecord> transcript;

    /// The distinguished kernel vector -e_1 + sum_{i in first_column_ones} e_{i+1}.
    std::vector<std::uint32_t> kernel_vector() const {
        const std::uint32_t p = canonical.modulus().value();
        std::vector<std::uint32_t> v(static_cast<std::size_t>(canonical.cols()), 0);
        v[0] = p - 1;
        for (int i : first_column_ones) v[static_cast<std::size_t>(i) + 1] = 1;
        return v;
    }
};

/// Applies a transcript to a (map, grid) pair, record by record.
inline std::pair<MatrixFp, GridFamily> replay_transcript(
    MatrixFp m, GridFamily grid, const std::vector<TransformRecord>& transcript) {
    for (const auto& rec : transcript) {
        if (const auto* sw = std::get_if<ColumnSwapRecord>(&rec)) {
            auto [m2, g2] = column_swap(m, grid, sw->i, sw->j);
            m = std::move(m2);
            grid = std::move(g2);
        } else if (const auto* rm = std::get_if<RowMultiplierRecord>(&rec)) {
            m = row_transform(m, rm->multiplier);
        } else {
            const auto& cs = std::get<ColumnScaleRecord>(rec);
            auto [m2, g2] = column_scale(m, grid, cs.column, cs.scalar);
            m = std::move(m2);
            grid = std::move(g2);
        }
    }
    return {std::move(m), std::move(grid)};
}

namespace detail {

/// Square submatrix of the columns listed in `cols`, in that order.
inline MatrixFp column_block(const MatrixFp& m, const std::vector<int>& cols) {
    MatrixFp b(m.modulus(), m.rows(), static_cast<int>(cols.size()));
    for (int r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            b.set(r, static_cast<int>(c), m.at(r, cols[c]));
        }
    }
    return b;
}

} // namespace detail

/// Reduces (M, grid) to the simple form. The excluded column stays first:
/// the last m columns are preferred as the identity block; if they are
/// dependent, the lexicographically smallest invertible m-subset of
/// columns is swapped to the back (sets swapped along, all recorded).
inline NormalizationResult normalize(MatrixFp m, GridFamily grid) {
    const PrimeModulus mod = m.modulus();
    const int rows = m.rows();
    const int n = m.cols();
    if (n != rows + 1) {
        throw ScopeError("normalize requires an m x (m+1) map");
    }
    if (grid.arity() != n) throw ValueError("grid arity does not match matrix columns");
    if (!grid.all_nonempty()) throw ValueError("normalize requires nonempty sets");
    if (rank(m) != rows) {
        throw ScopeError("map does not have full row rank; out of theorem scope");
    }

    std::vector<TransformRecord> transcript;

    // Pick the column excluded from the identity block. Excluding column 0
    // keeps the matrix as-is; otherwise excluding j yields the block
    // {0,...,n-1} \ {j}, and larger j means lexicographically smaller block.
    int excluded = -1;
    std::vector<int> order; // target column arrangement: excluded first, block after
    for (int cand = 0; cand <= n - 1; ++cand) {
        const int j = (cand == 0) ? 0 : n - cand; // 0, n-1, n-2, ..., 1
        std::vector<int> block;
        for (int c = 0; c < n; ++c) {
            if (c != j) block.push_back(c);
        }
        if (is_invertible(detail::column_block(m, block))) {
            excluded = j;
            order.assign(1, j);
            order.insert(order.end(), block.begin(), block.end());
            break;
        }
    }
    if (excluded < 0) {
        // unreachable once rank == rows: some m columns are independent
        throw ScopeError("no column ordering yields an invertible block");
    }

    // Selection sort toward `order`, recording each swap.
    std::vector<int> current(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) current[static_cast<std::size_t>(c)] = c;
    for (int pos = 0; pos < n; ++pos) {
        if (current[static_cast<std::size_t>(pos)] == order[static_cast<std::size_t>(pos)]) {
            continue;
        }
        int where = -1;
        for (int q = pos + 1; q < n; ++q) {
            if (current[static_cast<std::size_t>(q)] == order[static_cast<std::size_t>(pos)]) {
                where = q;
                break;
            }
        }
        std::swap(current[static_cast<std::size_t>(pos)], current[static_cast<std::size_t>(where)]);
        auto [m2, g2] = column_swap(m, grid, pos, where);
        m = std::move(m2);
        grid = std::move(g2);
        transcript.push_back(ColumnSwapRecord{pos, where});
    }

    // Row multiplier D * B^{-1}: B^{-1} turns the block into the identity,
    // D rescales rows so the first column lands in {0,1}.
    std::vector<int> back(static_cast<std::size_t>(rows));
    for (int c = 1; c < n; ++c) back[static_cast<std::size_t>(c - 1)] = c;
    const MatrixFp b_inv = inverse(detail::column_block(m, back));
    std::vector<std::uint32_t> u(static_cast<std::size_t>(rows), 0);
    {
        const auto col0 = m.column(0);
        for (int i = 0; i < rows; ++i) {
            std::uint64_t acc = 0;
            for (int k = 0; k < rows; ++k) {
                acc += static_cast<std::uint64_t>(b_inv.at(i, k)) * col0[static_cast<std::size_t>(k)];
            }
            u[static_cast<std::size_t>(i)] = mod.reduce(acc);
        }
    }
    MatrixFp r_total(mod, rows, rows);
    for (int i = 0; i < rows; ++i) {
        const std::uint32_t d = (u[static_cast<std::size_t>(i)] == 0)
                                    ? 1u
                                    : mod.inv(u[static_cast<std::size_t>(i)]);
        for (int k = 0; k < rows; ++k) {
            r_total.set(i, k, mod.mul(d, b_inv.at(i, k)));
        }
    }
    if (r_total != MatrixFp::identity(mod, rows)) {
        m = row_transform(m, r_total);
        transcript.push_back(RowMultiplierRecord{r_total});
    }

    // Restore the identity block: column i+1 now carries the diagonal entry
    // u_i^{-1}; scaling it back by u_i dilates A_{i+1} by u_i^{-1}.
    for (int i = 0; i < rows; ++i) {
        const std::uint32_t ui = u[static_cast<std::size_t>(i)];
        if (ui == 0 || ui == 1) continue;
        auto [m2, g2] = column_scale(m, grid, i + 1, ui);
        m = std::move(m2);
        grid = std::move(g2);
        transcript.push_back(ColumnScaleRecord{i + 1, ui});
    }

    NormalizationResult out{std::move(m), std::move(grid), {}, std::move(transcript)};
    for (int i = 0; i < rows; ++i) {
        const std::uint32_t e = out.canonical.at(i, 0);
        if (e == 1) {
            out.first_column_ones.push_back(i);
        } else if (e != 0) {
            throw Error("internal: canonical first column escaped {0,1}");
        }
        for (int j = 0; j < rows; ++j) {
            if (out.canonical.at(i, j + 1) != (i == j ? 1u : 0u)) {
                throw Error("internal: canonical block is not the identity");
            }
        }
    }
    // the distinguished vector must actually lie in the kernel
    const auto v = out.kernel_vector();
    for (auto y : out.canonical.apply(v)) {
        if (y != 0) throw Error("internal: canonical kernel vector check failed");
    }
    return out;
}

} // namespace gridimage
