#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gridimage/matrix.hpp"

namespace gridimage {

enum class Theorem { CauchyDavenport, MainTheorem, StarLemma, LargeK, Cover, None };

inline std::string theorem_name(Theorem t) {
    switch (t) {
    case Theorem::CauchyDavenport: return "CauchyDavenport";
    case Theorem::MainTheorem: return "MainTheorem";
    case Theorem::StarLemma: return "StarLemma";
    case Theorem::LargeK: return "LargeK";
    case Theorem::Cover: return "Cover";
    case Theorem::None: return "None";
    }
    return "None";
}

struct Precondition {
    std::string name;
    bool holds = false;
    std::string detail;
};

/// One evaluated lower bound. `value` is present exactly when the bound is
/// applicable — an inapplicable bound claims nothing, never a silent 0.
/// For Cover the value p^{n-1} is an exact-cover assertion, not just a
/// lower bound. best_bound fills `candidates` with everything it tried.
struct BoundReport {
    Theorem theorem = Theorem::None;
    bool applicable = false;
    std::string reason;
    std::optional<std::int64_t> value;
    std::vector<Precondition> preconditions;
    std::vector<BoundReport> candidates;
};

namespace detail {

inline void check_sizes_in_range(const std::vector<std::int64_t>& sizes, std::uint32_t p,
                                 std::int64_t lo) {
    for (auto s : sizes) {
        if (s < lo || s > static_cast<std::int64_t>(p)) {
            throw ValueError("set size " + std::to_string(s) + " out of range [" +
                             std::to_string(lo) + ", " + std::to_string(p) + "]");
        }
    }
}

inline std::int64_t checked_product(const std::vector<std::int64_t>& factors) {
    unsigned __int128 acc = 1;
    for (auto f : factors) {
        acc *= static_cast<unsigned __int128>(f);
        if (acc > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max())) {
            throw ValueError("bound value overflows 64-bit integer");
        }
    }
    return static_cast<std::int64_t>(acc);
}

inline std::int64_t checked_pow(std::int64_t base, int exp) {
    std::vector<std::int64_t> f(static_cast<std::size_t>(exp), base);
    return checked_product(f);
}

} // namespace detail

/// Lower bound prod s_i - prod (s_i - 1) for the map
/// (x_1,...,x_n) -> (x_1+x_n, ..., x_{n-1}+x_n); needs min+max <= p+1.
inline BoundReport star_bound(const std::vector<std::int64_t>& sizes, PrimeModulus mod) {
    if (sizes.size() < 2) throw ValueError("star bound needs at least two sizes");
    detail::check_sizes_in_range(sizes, mod.value(), 1);
    const auto [mn_it, mx_it] = std::minmax_element(sizes.begin(), sizes.end());
    const std::int64_t mn = *mn_it, mx = *mx_it;
    const std::int64_t p = mod.value();

    BoundReport r;
    r.theorem = Theorem::StarLemma;
    r.preconditions.push_back({"min_size + max_size <= p + 1", mn + mx <= p + 1,
                               std::to_string(mn) + " + " + std::to_string(mx) +
                                   " vs p + 1 = " + std::to_string(p + 1)});
    if (mn + mx <= p + 1) {
        std::vector<std::int64_t> minus_one(sizes);
        for (auto& s : minus_one) s -= 1;
        r.applicable = true;
        r.reason = "min_size + max_size <= p + 1";
        r.value = detail::checked_product(sizes) - detail::checked_product(minus_one);
    } else {
        r.reason = "min_size + max_size = " + std::to_string(mn + mx) + " exceeds p + 1 = " +
                   std::to_string(p + 1);
    }
    return r;
}

/// Lower bound (prod_{j not in S} k_j) * (prod_{i in S} k_i - prod_{i in S}(k_i-1))
/// for a rank-m map with kernel support S; needs min+max < p. S is 0-based here.
inline BoundReport main_theorem_bound(const std::vector<std::int64_t>& sizes,
                                      const std::vector<int>& support, PrimeModulus mod) {
    if (support.empty()) throw ValueError("kernel support must be nonempty");
    detail::check_sizes_in_range(sizes, mod.value(), 1);
    std::vector<bool> in_support(sizes.size(), false);
    for (int i : support) {
        if (i < 0 || static_cast<std::size_t>(i) >= sizes.size()) {
            throw ValueError("support index out of range");
        }
        in_support[static_cast<std::size_t>(i)] = true;
    }
    const auto [mn_it, mx_it] = std::minmax_element(sizes.begin(), sizes.end());
    const std::int64_t mn = *mn_it, mx = *mx_it;
    const std::int64_t p = mod.value();

    BoundReport r;
    r.theorem = Theorem::MainTheorem;
    r.preconditions.push_back({"min_size + max_size < p", mn + mx < p,
                               std::to_string(mn) + " + " + std::to_string(mx) + " vs p = " +
                                   std::to_string(p)});
    if (mn + mx < p) {
        std::vector<std::int64_t> co, in, in_minus_one;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (in_support[i]) {
                in.push_back(sizes[i]);
                in_minus_one.push_back(sizes[i] - 1);
            } else {
                co.push_back(sizes[i]);
            }
        }
        r.applicable = true;
        r.reason = "min_size + max_size < p";
        r.value = detail::checked_product(co) *
                  (detail::checked_product(in) - detail::checked_product(in_minus_one));
    } else {
        r.reason = "min_size + max_size = " + std::to_string(mn + mx) +
                   " is not below p = " + std::to_string(p);
    }
    return r;
}

/// Lower bound min(p^2 + 3k^2 - (2p+1)k, p^2) for three uniform sets of
/// size k under (x+z, y+z); needs 2k >= p+1.
inline BoundReport large_k_bound(PrimeModulus mod, std::int64_t k) {
    const std::int64_t p = mod.value();
    if (k < 1 || k > p) throw ValueError("k out of range [1, p]");

    BoundReport r;
    r.theorem = Theorem::LargeK;
    r.preconditions.push_back({"2k >= p + 1", 2 * k >= p + 1,
                               "2k = " + std::to_string(2 * k) + " vs p + 1 = " +
                                   std::to_string(p + 1)});
    if (2 * k >= p + 1) {
        r.applicable = true;
        r.reason = "2k >= p + 1";
        r.value = std::min(p * p + 3 * k * k - (2 * p + 1) * k, p * p);
    } else {
        r.reason = "2k = " + std::to_string(2 * k) + " is below p + 1 = " + std::to_string(p + 1);
    }
    return r;
}

/// Full-cover certificate: with the first n-1 sizes equal to k and the last
/// equal to k', (n-1)k + k' >= (n-1)p + 1 forces the image to be all of
/// F_p^{n-1}. Also reports the uniform threshold n*k > (n-1)*p.
inline BoundReport cover_condition(PrimeModulus mod, int n,
                                   const std::vector<std::int64_t>& sizes) {
    if (n < 2) throw ValueError("cover condition needs n >= 2");
    if (static_cast<int>(sizes.size()) != n) throw ValueError("sizes length must equal n");
    detail::check_sizes_in_range(sizes, mod.value(), 1);
    const std::int64_t k = sizes.front();
    for (int i = 0; i + 1 < n; ++i) {
        if (sizes[static_cast<std::size_t>(i)] != k) {
            throw NonUniformSizesError("cover condition requires the first n-1 sizes to be equal");
        }
    }
    const std::int64_t kp = sizes.back();
    const std::int64_t p = mod.value();
    const std::int64_t lhs = static_cast<std::int64_t>(n - 1) * k + kp;
    const std::int64_t rhs = static_cast<std::int64_t>(n - 1) * p + 1;

    BoundReport r;
    r.theorem = Theorem::Cover;
    r.preconditions.push_back({"(n-1)*k + k' >= (n-1)*p + 1", lhs >= rhs,
                               std::to_string(lhs) + " vs " + std::to_string(rhs)});
    r.preconditions.push_back({"n*k > (n-1)*p", n * k > (n - 1) * p,
                               std::to_string(n * k) + " vs " + std::to_string((n - 1) * p)});
    if (lhs >= rhs) {
        r.applicable = true;
        r.reason = "(n-1)*k + k' >= (n-1)*p + 1";
        r.value = detail::checked_pow(p, n - 1);
    } else {
        r.reason = "(n-1)*k + k' = " + std::to_string(lhs) + " is below " + std::to_string(rhs);
    }
    return r;
}

/// (max(0, x+y-p), min(x, y)): the range every fiber count t_a must lie in.
inline std::pair<std::int64_t, std::int64_t> fiber_bounds(std::int64_t x_size,
                                                          std::int64_t y_size,
                                                          PrimeModulus mod) {
    const std::int64_t p = mod.value();
    if (x_size < 0 || x_size > p || y_size < 0 || y_size > p) {
        throw ValueError("set size out of range [0, p]");
    }
    return {std::max<std::int64_t>(0, x_size + y_size - p), std::min(x_size, y_size)};
}

/// min(|A|+|B|-1, p): the sumset lower bound underlying everything else.
inline std::int64_t cd_lower_bound_value(std::int64_t a_size, std::int64_t b_size,
                                         PrimeModulus mod) {
    return cd_lower_bound(a_size, b_size, mod);
}

/// Evaluates every bound whose shape matches (M, sizes) and returns the
/// best applicable one, with all candidates attached. Rank-deficient or
/// non-(m x m+1) maps get an explicit None, never a guessed value.
inline BoundReport best_bound(const MatrixFp& m, const std::vector<std::int64_t>& sizes) {
    if (static_cast<int>(sizes.size()) != m.cols()) {
        throw ValueError("sizes length must equal the number of columns");
    }
    detail::check_sizes_in_range(sizes, m.modulus().value(), 1);

    BoundReport out;
    if (m.cols() != m.rows() + 1 || rank(m) != m.rows()) {
        out.theorem = Theorem::None;
        out.applicable = false;
        out.reason = "out of theorem scope";
        out.preconditions.push_back(
            {"map is m x (m+1) of rank m", false,
             "rows = " + std::to_string(m.rows()) + ", cols = " + std::to_string(m.cols()) +
                 ", rank = " + std::to_string(rank(m))});
        return out;
    }

    const KernelDescription ker = kernel_basis(m);
    const bool full_support = static_cast<int>(ker.support.size()) == m.cols();
    const bool uniform =
        std::all_of(sizes.begin(), sizes.end(), [&](std::int64_t s) { return s == sizes[0]; });

    std::vector<BoundReport> candidates;
    if (m.cols() == 2 && full_support) {
        BoundReport cd;
        cd.theorem = Theorem::CauchyDavenport;
        cd.applicable = true;
        cd.reason = "two sets, kernel supported on both coordinates";
        cd.value = cd_lower_bound_value(sizes[0], sizes[1], m.modulus());
        candidates.push_back(std::move(cd));
    }
    candidates.push_back(main_theorem_bound(sizes, ker.support, m.modulus()));
    if (full_support) {
        candidates.push_back(star_bound(sizes, m.modulus()));
    }
    if (m.cols() == 3 && full_support && uniform) {
        candidates.push_back(large_k_bound(m.modulus(), sizes[0]));
    }
    if (is_star_matrix(m)) {
        bool prefix_uniform = true;
        for (int i = 0; i + 1 < m.cols(); ++i) {
            prefix_uniform &= sizes[static_cast<std::size_t>(i)] == sizes[0];
        }
        if (prefix_uniform) {
            candidates.push_back(cover_condition(m.modulus(), m.cols(), sizes));
        }
    }

    int best = -1;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!candidates[i].applicable) continue;
        if (best < 0 || *candidates[i].value > *candidates[static_cast<std::size_t>(best)].value) {
            best = static_cast<int>(i);
        }
    }
    if (best >= 0) {
        out = candidates[static_cast<std::size_t>(best)];
    } else {
        out.theorem = Theorem::None;
        out.applicable = false;
        out.reason = "no bound precondition holds for these sizes";
    }
    out.candidates = std::move(candidates);
    return out;
}

} // namespace gridimage
