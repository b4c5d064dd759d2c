#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "gridimage/explorer.hpp"
#include "gridimage/normalize.hpp"
#include "gridimage/text.hpp"

// The verification suites behind both `gridimage verify` and the
// acceptance runner. Every check is exact integer arithmetic; randomized
// checks draw all entropy from the caller-provided seed.

namespace gridimage {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::int64_t checked = 0; // instances examined
    std::string detail;
    double millis = 0.0;
};

namespace detail {

template <typename Body>
CheckResult run_check(const std::string& name, Body&& body) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.pass = true;
        body(r); // sets r.pass = false (with detail) on the first violation
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return r;
}

inline void fail(CheckResult& r, std::string detail) {
    r.pass = false;
    if (r.detail.empty()) r.detail = std::move(detail);
}

/// Visits every grid family of the given shape in colex-odometer order.
template <typename Fn>
void for_each_family(PrimeModulus mod, const std::vector<std::int64_t>& shape, Fn&& fn) {
    const int p = static_cast<int>(mod.value());
    std::vector<std::uint64_t> masks, firsts, lasts;
    for (auto k : shape) {
        masks.push_back(first_colex_mask(static_cast<int>(k)));
        firsts.push_back(first_colex_mask(static_cast<int>(k)));
        lasts.push_back(last_colex_mask(p, static_cast<int>(k)));
    }
    for (;;) {
        fn(grid_from_masks(mod, masks));
        std::size_t c = 0;
        for (; c < masks.size(); ++c) {
            if (masks[c] == lasts[c]) {
                masks[c] = firsts[c];
            } else {
                masks[c] = next_colex_mask(masks[c]);
                break;
            }
        }
        if (c == masks.size()) return; // odometer wrapped
    }
}

inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> ps{2, 3, 5, 7, 11, 13};
    return ps;
}

} // namespace detail

/// Exhaustive sumset bound over F_7: every pair of nonempty sets.
inline CheckResult check_cd() {
    return detail::run_check("cd-exhaustive", [](CheckResult& r) {
        const PrimeModulus mod(7);
        for (std::uint64_t a = 1; a < 128 && r.pass; ++a) {
            const ResidueSet A = ResidueSet::from_bits(mod, a);
            for (std::uint64_t b = 1; b < 128; ++b) {
                const ResidueSet B = ResidueSet::from_bits(mod, b);
                const std::int64_t lower = cd_lower_bound(A.size(), B.size(), mod);
                const std::int64_t actual = sumset(A, B).size();
                ++r.checked;
                if (actual < lower) {
                    detail::fail(r, "|A+B| = " + std::to_string(actual) + " below " +
                                        std::to_string(lower) + " for A=" +
                                        std::to_string(a) + " B=" + std::to_string(b));
                    break;
                }
            }
        }
        if (r.pass) r.detail = "all nonempty pairs over F_7";
    });
}

/// Interval grids meet the product-difference formula exactly.
inline CheckResult check_tightness() {
    return detail::run_check("tightness-sweep", [](CheckResult& r) {
        for (std::uint32_t p : {5u, 7u, 11u, 13u}) {
            const PrimeModulus mod(p);
            for (int m : {2, 3}) {
                for (std::int64_t k = 1; 2 * k <= p + 1; ++k) {
                    const std::vector<std::int64_t> ks(static_cast<std::size_t>(m) + 1, k);
                    const ExtremalRecord rec = verify_tightness(mod, m, ks);
                    std::int64_t expect = 1, expect_minus = 1;
                    for (int i = 0; i <= m; ++i) {
                        expect *= k;
                        expect_minus *= k - 1;
                    }
                    expect -= expect_minus;
                    ++r.checked;
                    if (!rec.tight || rec.image_size != expect) {
                        detail::fail(r, "p=" + std::to_string(p) + " m=" + std::to_string(m) +
                                            " k=" + std::to_string(k) + ": image " +
                                            std::to_string(rec.image_size) + " vs " +
                                            std::to_string(expect));
                        return;
                    }
                }
            }
        }
        r.detail = "interval image = k^{m+1} - (k-1)^{m+1} throughout";
    });
}

/// Exhaustive image >= bound for sampled full-rank maps, all qualifying
/// shapes, all grids, at p in {3, 5}.
inline CheckResult check_main_soundness(std::uint64_t seed) {
    return detail::run_check("main-soundness", [seed](CheckResult& r) {
        for (std::uint32_t p : {3u, 5u}) {
            const PrimeModulus mod(p);
            SplitMix64 g(sub_seed(seed, p));
            for (int map_i = 0; map_i < 20 && r.pass; ++map_i) {
                const MatrixFp raw = random_full_rank_map(g, mod, 2);
                const GridFamily dummy = GridFamily::uniform(mod, 3, ResidueSet::full(mod));
                const MatrixFp canon = normalize(raw, dummy).canonical;
                const auto support = kernel_basis(canon).support;
                for (std::int64_t k1 = 1; static_cast<std::uint32_t>(k1) <= p; ++k1)
                    for (std::int64_t k2 = 1; static_cast<std::uint32_t>(k2) <= p; ++k2)
                        for (std::int64_t k3 = 1; static_cast<std::uint32_t>(k3) <= p; ++k3) {
                            const std::vector<std::int64_t> shape{k1, k2, k3};
                            const auto mn = std::min({k1, k2, k3});
                            const auto mx = std::max({k1, k2, k3});
                            if (mn + mx >= static_cast<std::int64_t>(p)) continue;
                            const BoundReport b = main_theorem_bound(shape, support, mod);
                            if (!b.applicable) {
                                detail::fail(r, "bound unexpectedly inapplicable");
                                return;
                            }
                            detail::for_each_family(mod, shape, [&](const GridFamily& grid) {
                                if (!r.pass) return;
                                const std::int64_t size = image_size(canon, grid);
                                ++r.checked;
                                if (size < *b.value) {
                                    detail::fail(
                                        r, "image " + std::to_string(size) + " below bound " +
                                               std::to_string(*b.value) + " at p=" +
                                               std::to_string(p) + " map " +
                                               format_matrix(canon));
                                }
                            });
                            if (!r.pass) return;
                        }
            }
        }
        if (r.pass) r.detail = "20 sampled maps per p, all grids of all qualifying shapes";
    });
}

/// Image size is invariant under row transforms and column scales, and the
/// image set itself under column swaps.
inline CheckResult check_lemma_invariance(std::uint64_t seed) {
    return detail::run_check("lemma-invariance", [seed](CheckResult& r) {
        const auto& primes = detail::small_primes();
        for (std::int64_t i = 0; i < 10'000 && r.pass; ++i) {
            SplitMix64 g(sub_seed(seed, static_cast<std::uint64_t>(i)));
            const PrimeModulus mod(primes[g.bounded(primes.size())]);
            const int m = 1 + static_cast<int>(g.bounded(3));
            const int n = m + 1;
            const MatrixFp map = random_matrix(g, mod, m, n);
            std::vector<ResidueSet> sets;
            for (int c = 0; c < n; ++c) sets.push_back(random_nonempty_set(g, mod));
            const GridFamily grid(mod, std::move(sets));
            ++r.checked;
            switch (i % 3) {
            case 0: {
                const MatrixFp rmul = random_invertible_matrix(g, mod, m);
                if (image_size(row_transform(map, rmul), grid) != image_size(map, grid)) {
                    detail::fail(r, "row transform changed the image size (trial " +
                                        std::to_string(i) + ")");
                }
                break;
            }
            case 1: {
                const int col = static_cast<int>(g.bounded(static_cast<std::uint64_t>(n)));
                const auto d =
                    1 + static_cast<std::uint32_t>(g.bounded(mod.value() - 1));
                const auto [m2, g2] = column_scale(map, grid, col, d);
                if (image_size(m2, g2) != image_size(map, grid)) {
                    detail::fail(r, "column scale changed the image size (trial " +
                                        std::to_string(i) + ")");
                }
                break;
            }
            default: {
                const int ci = static_cast<int>(g.bounded(static_cast<std::uint64_t>(n)));
                int cj = static_cast<int>(g.bounded(static_cast<std::uint64_t>(n - 1)));
                if (cj >= ci) ++cj;
                const auto [m2, g2] = column_swap(map, grid, ci, cj);
                if (image(m2, g2) != image(map, grid)) {
                    detail::fail(r, "column swap changed the image set (trial " +
                                        std::to_string(i) + ")");
                }
                break;
            }
            }
        }
        if (r.pass) r.detail = "10^4 random (map, grid, transformation) triples, p <= 13";
    });
}

/// The min-support size of the kernel never moves under invertible row
/// multipliers.
inline CheckResult check_min_support_invariance(std::uint64_t seed) {
    return detail::run_check("min-support-invariance", [seed](CheckResult& r) {
        const auto& primes = detail::small_primes();
        for (std::int64_t i = 0; i < 1'000 && r.pass; ++i) {
            SplitMix64 g(sub_seed(seed, static_cast<std::uint64_t>(i)));
            const PrimeModulus mod(primes[g.bounded(primes.size())]);
            const int m = 1 + static_cast<int>(g.bounded(3));
            const MatrixFp map = random_full_rank_map(g, mod, m);
            const MatrixFp rmul = random_invertible_matrix(g, mod, m);
            const auto before = kernel_basis(map).support;
            const auto after = kernel_basis(row_transform(map, rmul)).support;
            ++r.checked;
            if (before.size() != after.size()) {
                detail::fail(r, "support size moved from " + std::to_string(before.size()) +
                                    " to " + std::to_string(after.size()) + " (trial " +
                                    std::to_string(i) + ")");
            }
        }
        if (r.pass) r.detail = "10^3 random full-rank maps and row multipliers";
    });
}

/// Random uniform grids in the window never dip below the large-k bound.
inline CheckResult check_large_k_soundness(std::uint64_t seed) {
    return detail::run_check("large-k-soundness", [seed](CheckResult& r) {
        std::uint64_t trial = 0;
        for (std::uint32_t p : {7u, 11u, 13u}) {
            const PrimeModulus mod(p);
            const std::int64_t lo = (p + 1) / 2;
            const std::int64_t hi = (2 * static_cast<std::int64_t>(p) + 2) / 3;
            for (std::int64_t k = lo; k <= hi; ++k) {
                const std::int64_t bound = *large_k_bound(mod, k).value;
                for (int i = 0; i < 1'000; ++i) {
                    SplitMix64 g(sub_seed(seed, trial++));
                    const GridFamily grid = random_grid(g, mod, {k, k, k});
                    const std::int64_t size = star_image_fast(grid).size();
                    ++r.checked;
                    if (size < bound) {
                        detail::fail(r, "image " + std::to_string(size) + " below " +
                                            std::to_string(bound) + " at p=" +
                                            std::to_string(p) + " k=" + std::to_string(k));
                        return;
                    }
                }
            }
        }
        r.detail = "10^3 random grids per (p, k) across the window";
    });
}

/// At p = 2k-1 the two bound formulas collapse to the same number,
/// k^3 - (k-1)^3; checked for every odd prime p below 10^6.
inline CheckResult check_boundary_identity() {
    return detail::run_check("boundary-identity", [](CheckResult& r) {
        constexpr std::uint32_t kLimit = 1'000'000;
        std::vector<bool> composite(kLimit, false);
        for (std::uint32_t d = 2; d * d < kLimit; ++d) {
            if (composite[d]) continue;
            for (std::uint32_t x = d * d; x < kLimit; x += d) composite[x] = true;
        }
        for (std::uint32_t p = 3; p < kLimit; p += 2) {
            if (composite[p]) continue;
            const PrimeModulus mod(p, kLimit);
            const std::int64_t k = (static_cast<std::int64_t>(p) + 1) / 2;
            const std::int64_t large = *large_k_bound(mod, k).value;
            const std::int64_t star = *star_bound({k, k, k}, mod).value;
            ++r.checked;
            if (large != star || large != 3 * k * k - 3 * k + 1) {
                detail::fail(r, "mismatch at p = " + std::to_string(p));
                return;
            }
        }
        r.detail = "both formulas equal 3k^2 - 3k + 1 at p = 2k - 1 for all odd primes < 10^6";
    });
}

/// Full-cover instances really cover: translates, random grids, and
/// mixed shapes at p = 5, plus the two-set case at p = 7.
inline CheckResult check_cover(std::uint64_t seed) {
    return detail::run_check("cover", [seed](CheckResult& r) {
        const PrimeModulus mod5(5);
        std::uint64_t trial = 0;
        // every translate combination of (4,4,4) intervals
        for (std::uint32_t c1 = 0; c1 < 5; ++c1)
            for (std::uint32_t c2 = 0; c2 < 5; ++c2)
                for (std::uint32_t c3 = 0; c3 < 5; ++c3) {
                    const GridFamily grid(
                        mod5, {translate(interval_set(mod5, 4), c1),
                               translate(interval_set(mod5, 4), c2),
                               translate(interval_set(mod5, 4), c3)});
                    ++r.checked;
                    if (star_image_fast(grid).size() != 25) {
                        detail::fail(r, "translate grid missed full cover");
                        return;
                    }
                }
        // random (4,4,4) grids
        for (int i = 0; i < 1'000; ++i) {
            SplitMix64 g(sub_seed(seed, trial++));
            const GridFamily grid = random_grid(g, mod5, {4, 4, 4});
            ++r.checked;
            if (star_image_fast(grid).size() != 25) {
                detail::fail(r, "random (4,4,4) grid missed full cover");
                return;
            }
        }
        // mixed shapes satisfying (n-1)k + k' >= (n-1)p + 1
        for (std::int64_t k = 1; k <= 5; ++k)
            for (std::int64_t kp = 1; kp <= 5; ++kp) {
                if (2 * k + kp < 11) continue;
                const BoundReport cover = cover_condition(mod5, 3, {k, k, kp});
                if (!cover.applicable || *cover.value != 25) {
                    detail::fail(r, "cover condition mis-evaluated");
                    return;
                }
                for (int i = 0; i < 100; ++i) {
                    SplitMix64 g(sub_seed(seed, trial++));
                    const GridFamily grid = random_grid(g, mod5, {k, k, kp});
                    ++r.checked;
                    if (star_image_fast(grid).size() != 25) {
                        detail::fail(r, "shape (" + std::to_string(k) + "," +
                                            std::to_string(k) + "," + std::to_string(kp) +
                                            ") missed full cover");
                        return;
                    }
                }
            }
        // two sets over F_7: |A| = |B| = 4 forces A + B = F_7
        const PrimeModulus mod7(7);
        for (int i = 0; i < 200; ++i) {
            SplitMix64 g(sub_seed(seed, trial++));
            const ResidueSet a = random_subset(g, mod7, 4);
            const ResidueSet b = random_subset(g, mod7, 4);
            ++r.checked;
            if (sumset(a, b).size() != 7) {
                detail::fail(r, "two size-4 sets failed to cover F_7");
                return;
            }
        }
        r.detail = "translates, random grids, mixed shapes, and the two-set case";
    });
}

/// Every fiber profile obeys the clamped bounds and the sum identity.
inline CheckResult check_fibers(std::uint64_t seed) {
    return detail::run_check("fiber-profile", [seed](CheckResult& r) {
        const auto& primes = detail::small_primes();
        for (std::int64_t i = 0; i < 10'000 && r.pass; ++i) {
            SplitMix64 g(sub_seed(seed, static_cast<std::uint64_t>(i)));
            const PrimeModulus mod(primes[g.bounded(primes.size())]);
            const ResidueSet x = random_nonempty_set(g, mod);
            const ResidueSet y = random_nonempty_set(g, mod);
            const auto [lo, hi] = fiber_bounds(x.size(), y.size(), mod);
            const FiberProfile prof = fiber_counts(x, y);
            ++r.checked;
            for (auto t : prof.counts) {
                if (t < lo || t > hi) {
                    detail::fail(r, "fiber count " + std::to_string(t) + " outside [" +
                                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
                    break;
                }
            }
            if (prof.total() != x.size() * y.size()) {
                detail::fail(r, "fiber counts do not sum to |X||Y|");
            }
        }
        if (r.pass) r.detail = "10^4 random pairs, p <= 13";
    });
}

/// The specialized star walk and the generic evaluator agree bit for bit.
inline CheckResult check_oracle_equivalence(std::uint64_t seed) {
    return detail::run_check("oracle-equivalence", [seed](CheckResult& r) {
        const PrimeModulus mod3(3);
        const MatrixFp star3 = star_matrix(mod3, 3);
        for (std::uint64_t a = 1; a < 8 && r.pass; ++a)
            for (std::uint64_t b = 1; b < 8 && r.pass; ++b)
                for (std::uint64_t c = 1; c < 8; ++c) {
                    const GridFamily grid(mod3, {ResidueSet::from_bits(mod3, a),
                                                 ResidueSet::from_bits(mod3, b),
                                                 ResidueSet::from_bits(mod3, c)});
                    ++r.checked;
                    if (star_image_fast(grid) != image(star3, grid)) {
                        detail::fail(r, "fast path diverged on the exhaustive p=3 sweep");
                        break;
                    }
                }
        const auto& primes = detail::small_primes();
        for (std::int64_t i = 0; i < 1'000 && r.pass; ++i) {
            SplitMix64 g(sub_seed(seed, static_cast<std::uint64_t>(i)));
            const PrimeModulus mod(primes[g.bounded(primes.size())]);
            const int n = 2 + static_cast<int>(g.bounded(3));
            std::vector<ResidueSet> sets;
            for (int c = 0; c < n; ++c) sets.push_back(random_nonempty_set(g, mod));
            const GridFamily grid(mod, std::move(sets));
            ++r.checked;
            if (star_image_fast(grid) != image(star_matrix(mod, n), grid)) {
                detail::fail(r, "fast path diverged on random trial " + std::to_string(i));
            }
        }
        if (r.pass) r.detail = "343 exhaustive grids at p=3 plus 10^3 random grids";
    });
}

/// At both window endpoints the interval image equals the theorem bound;
/// where exhaustive search is cheap it confirms no grid does better.
inline CheckResult check_conjecture_endpoints(std::uint64_t seed) {
    return detail::run_check("conjecture-endpoints", [seed](CheckResult& r) {
        std::uint64_t pair = 0;
        for (std::uint32_t p : {7u, 11u, 13u}) {
            const PrimeModulus mod(p);
            const std::int64_t lo = (p + 1) / 2;
            const std::int64_t hi = (2 * static_cast<std::int64_t>(p) + 2) / 3;
            for (std::int64_t k : {lo, hi}) {
                const ConjectureReport rep = conjecture_gap_report(
                    mod, k, 40, sub_seed(seed, pair++), 1, 50'000);
                ++r.checked;
                if (rep.gap_interval_vs_bound != 0) {
                    detail::fail(r, "gap " + std::to_string(rep.gap_interval_vs_bound) +
                                        " at p=" + std::to_string(p) + " k=" +
                                        std::to_string(k));
                    return;
                }
                if (rep.gap_search_vs_interval < 0 ||
                    (rep.exhaustive_min && *rep.exhaustive_min != rep.interval_image)) {
                    detail::fail(r, "a grid beat the interval image at p=" +
                                        std::to_string(p) + " k=" + std::to_string(k));
                    return;
                }
            }
        }
        r.detail = "gap 0 at k = (p+1)/2 and k = ceil(2p/3) for p in {7, 11, 13}";
    });
}

inline CheckResult run_named_check(const std::string& name, std::uint64_t seed) {
    if (name == "cd-exhaustive") return check_cd();
    if (name == "tightness-sweep") return check_tightness();
    if (name == "main-soundness") return check_main_soundness(seed);
    if (name == "lemma-invariance") return check_lemma_invariance(seed);
    if (name == "min-support-invariance") return check_min_support_invariance(seed);
    if (name == "large-k-soundness") return check_large_k_soundness(seed);
    if (name == "boundary-identity") return check_boundary_identity();
    if (name == "cover") return check_cover(seed);
    if (name == "fiber-profile") return check_fibers(seed);
    if (name == "oracle-equivalence") return check_oracle_equivalence(seed);
    if (name == "conjecture-endpoints") return check_conjecture_endpoints(seed);
    throw ValueError("unknown check: " + name);
}

inline bool check_needs_seed(const std::string& name) {
    return name != "cd-exhaustive" && name != "tightness-sweep" &&
           name != "boundary-identity";
}

/// Check names for a verify suite; "all" runs everything.
inline std::vector<std::string> checks_for_suite(const std::string& suite) {
    if (suite == "cd") return {"cd-exhaustive"};
    if (suite == "tightness") return {"tightness-sweep"};
    if (suite == "invariance") return {"lemma-invariance", "min-support-invariance"};
    if (suite == "large-k") return {"large-k-soundness", "boundary-identity"};
    if (suite == "cover") return {"cover"};
    if (suite == "boundary-identity") return {"boundary-identity"};
    if (suite == "all") {
        return {"cd-exhaustive",       "tightness-sweep",
                "main-soundness",      "lemma-invariance",
                "min-support-invariance", "large-k-soundness",
                "boundary-identity",   "cover",
                "fiber-profile",       "oracle-equivalence",
                "conjecture-endpoints"};
    }
    throw ValueError("unknown suite: " + suite +
                     " (expected cd, tightness, invariance, large-k, cover, "
                     "boundary-identity, or all)");
}

inline bool suite_needs_seed(const std::string& suite) {
    for (const auto& c : checks_for_suite(suite)) {
        if (check_needs_seed(c)) return true;
    }
    return false;
}

} // namespace gridimage
