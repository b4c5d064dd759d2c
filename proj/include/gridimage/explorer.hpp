#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gridimage/bounds.hpp"
#include "gridimage/image.hpp"
#include "gridimage/rng.hpp"
#include "gridimage/subsets.hpp"

namespace gridimage {

/// Default ceiling on how many grid families an exhaustive run may visit.
inline constexpr std::uint64_t kDefaultFamilyCap = 100'000'000;

enum class SearchMode { Exhaustive, Random };

struct SearchConfig {
    PrimeModulus mod;
    std::vector<std::int64_t> shape;
    SearchMode mode = SearchMode::Exhaustive;
    std::int64_t iterations = 0; // random mode only
    std::uint64_t seed = 0;      // random mode only
    int workers = 1;
    std::uint64_t family_cap = kDefaultFamilyCap;
    std::uint64_t cell_cap = kDefaultCellCap;
};

/// A grid together with its exact image size and the best bound for its
/// shape. Soundness (image >= applicable bound) is re-checked whenever a
/// record is built; a violation would falsify a theorem, so it is treated
/// as an internal error, not a result.
struct ExtremalRecord {
    GridFamily grid;
    std::int64_t image_size = 0;
    BoundReport bound;
    bool tight = false;
};

inline ExtremalRecord make_extremal_record(const MatrixFp& map, GridFamily grid,
                                           std::int64_t size) {
    BoundReport bound = best_bound(map, grid.sizes());
    if (bound.applicable && size < *bound.value) {
        throw Error("internal: exact image size " + std::to_string(size) +
                    " fell below the " + theorem_name(bound.theorem) + " bound " +
                    std::to_string(*bound.value));
    }
    const bool tight = bound.applicable && size == *bound.value;
    return {std::move(grid), size, std::move(bound), tight};
}

/// Number of grid families of the given shape, or nullopt when the count
/// does not even fit in 64 bits (then it certainly exceeds any cap).
inline std::optional<std::uint64_t> count_families(PrimeModulus mod,
                                                   const std::vector<std::int64_t>& shape) {
    if (shape.empty()) throw ValueError("shape must be nonempty");
    unsigned __int128 total = 1;
    for (auto k : shape) {
        if (k < 1 || k > static_cast<std::int64_t>(mod.value())) {
            throw ValueError("set size out of range [1, p]");
        }
        total *= binomial(static_cast<int>(mod.value()), static_cast<int>(k));
        if (total > static_cast<unsigned __int128>(~std::uint64_t{0})) return std::nullopt;
    }
    return static_cast<std::uint64_t>(total);
}

/// Interval grids meet the bound exactly: builds {0..k_i-1} sets, computes
/// the exact star image, and reports whether it equals the formula.
inline ExtremalRecord verify_tightness(PrimeModulus mod, int m,
                                       const std::vector<std::int64_t>& ks,
                                       std::uint64_t cell_cap = kDefaultCellCap) {
    if (static_cast<int>(ks.size()) != m + 1) {
        throw ValueError("need m+1 sizes for an m-dimensional star image");
    }
    BoundReport b = star_bound(ks, mod);
    if (!b.applicable) throw ValueError("sizes out of bound scope: " + b.reason);
    std::vector<std::uint32_t> widths(ks.begin(), ks.end());
    GridFamily grid = GridFamily::intervals(mod, widths);
    const std::int64_t size = star_image_fast(grid, cell_cap).size();
    if (size < *b.value) {
        throw Error("internal: exact interval image below its lower bound");
    }
    const bool tight = size == *b.value;
    return {std::move(grid), size, std::move(b), tight};
}

/// Resumable progress marker for an exhaustive run: all families with
/// global index below `position` have been scanned.
struct SearchCheckpoint {
    std::uint64_t position = 0;
    std::int64_t best_size = -1; // -1: nothing scanned yet
    std::uint64_t best_index = 0;
    std::vector<std::uint64_t> best_masks;
};

using CheckpointSink = std::function<void(const SearchCheckpoint&)>;

namespace detail {

/// Per-coordinate colex digits of a global family index; coordinate 0 is
/// the fastest-varying digit.
inline std::vector<std::uint64_t> family_masks_at(PrimeModulus mod,
                                                  const std::vector<std::int64_t>& shape,
                                                  std::uint64_t index) {
    std::vector<std::uint64_t> masks(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const std::uint64_t c =
            binomial(static_cast<int>(mod.value()), static_cast<int>(shape[i]));
        masks[i] = colex_unrank(static_cast<int>(shape[i]), index % c);
        index /= c;
    }
    return masks;
}

inline GridFamily grid_from_masks(PrimeModulus mod, const std::vector<std::uint64_t>& masks) {
    std::vector<ResidueSet> sets;
    sets.reserve(masks.size());
    for (auto mask : masks) sets.push_back(ResidueSet::from_bits(mod, mask));
    return GridFamily(mod, std::move(sets));
}

} // namespace detail

/// Scans every grid family of the configured shape and returns the first
/// minimizer in colex-odometer order. Deterministic for any worker count:
/// workers take contiguous index ranges and the reduction is by
/// (size, first index). A checkpoint sink is honored for single-worker
/// runs; `resume` continues from a previous checkpoint.
inline ExtremalRecord exhaustive_min_image(
    const SearchConfig& config, const MatrixFp& map,
    const std::optional<SearchCheckpoint>& resume = std::nullopt,
    const CheckpointSink& sink = nullptr, std::uint64_t checkpoint_stride = 1u << 20) {
    if (config.mode != SearchMode::Exhaustive) throw ValueError("config is not exhaustive");
    if (config.mod != map.modulus()) throw ValueError("modulus mismatch");
    if (static_cast<int>(config.shape.size()) != map.cols()) {
        throw ValueError("shape length must equal the number of columns");
    }
    const auto families = count_families(config.mod, config.shape);
    if (!families || *families > config.family_cap) {
        throw CapError("family count exceeds cap " + std::to_string(config.family_cap) +
                       "; use random mode");
    }
    const std::uint64_t total = *families;
    const std::uint64_t start = resume ? resume->position : 0;
    if (start > total) throw ValueError("resume position beyond the family count");

    const std::uint32_t p = config.mod.value();
    const int n = map.cols();
    std::vector<std::uint64_t> first_masks(static_cast<std::size_t>(n)),
        last_masks(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        first_masks[static_cast<std::size_t>(i)] =
            first_colex_mask(static_cast<int>(config.shape[static_cast<std::size_t>(i)]));
        last_masks[static_cast<std::size_t>(i)] = last_colex_mask(
            static_cast<int>(p), static_cast<int>(config.shape[static_cast<std::size_t>(i)]));
    }

    struct LaneBest {
        std::int64_t size = -1;
        std::uint64_t index = 0;
        std::vector<std::uint64_t> masks;
    };

    const std::uint64_t remaining = total - start;
    const int lanes = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(std::max(config.workers, 1)), std::max<std::uint64_t>(remaining, 1)));
    std::vector<LaneBest> bests(static_cast<std::size_t>(lanes));

    auto scan = [&](std::uint64_t lo, std::uint64_t hi, LaneBest* best, bool use_sink) {
        auto masks = detail::family_masks_at(config.mod, config.shape, lo);
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            GridFamily grid = detail::grid_from_masks(config.mod, masks);
            const std::int64_t size = image_size(map, grid, 1, config.cell_cap);
            if (best->size < 0 || size < best->size) {
                best->size = size;
                best->index = idx;
                best->masks = masks;
            }
            // advance the odometer, coordinate 0 fastest
            for (std::size_t c = 0; c < masks.size(); ++c) {
                if (masks[c] == last_masks[c]) {
                    masks[c] = first_masks[c];
                } else {
                    masks[c] = next_colex_mask(masks[c]);
                    break;
                }
            }
            if (use_sink && sink && ((idx + 1 - lo) % checkpoint_stride == 0 || idx + 1 == hi)) {
                sink(SearchCheckpoint{idx + 1, best->size, best->index, best->masks});
            }
        }
    };

    if (lanes <= 1) {
        scan(start, total, &bests[0], true);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(lanes));
        for (int t = 0; t < lanes; ++t) {
            const std::uint64_t lo =
                start + remaining * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(lanes);
            const std::uint64_t hi =
                start + remaining * (static_cast<std::uint64_t>(t) + 1) /
                            static_cast<std::uint64_t>(lanes);
            pool.emplace_back(scan, lo, hi, &bests[static_cast<std::size_t>(t)], false);
        }
        for (auto& th : pool) th.join();
    }

    LaneBest winner;
    if (resume && resume->best_size >= 0) {
        winner = {resume->best_size, resume->best_index, resume->best_masks};
    }
    for (const auto& b : bests) {
        if (b.size < 0) continue;
        if (winner.size < 0 || b.size < winner.size ||
            (b.size == winner.size && b.index < winner.index)) {
            winner = b;
        }
    }
    if (winner.size < 0) throw ValueError("nothing to scan: empty index range");

    return make_extremal_record(map, detail::grid_from_masks(config.mod, winner.masks),
                                winner.size);
}

namespace detail {

/// One seeded descent: random start, then single-element swaps that never
/// increase the image size, for a fixed proposal budget.
inline std::pair<GridFamily, std::int64_t> hill_descent(const MatrixFp& map,
                                                        const SearchConfig& config,
                                                        std::uint64_t iteration_seed) {
    SplitMix64 g(iteration_seed);
    const std::uint32_t p = config.mod.value();
    const int n = static_cast<int>(config.shape.size());
    GridFamily grid = random_grid(g, config.mod, config.shape);
    std::int64_t size = image_size(map, grid, 1, config.cell_cap);
    const std::int64_t budget = 20LL * n * p;
    for (std::int64_t step = 0; step < budget; ++step) {
        const int c = static_cast<int>(g.bounded(static_cast<std::uint64_t>(n)));
        const ResidueSet& s = grid.set(c);
        const std::uint32_t k = static_cast<std::uint32_t>(s.size());
        if (k == p) continue; // nothing to swap in a full coordinate
        const auto members = s.members();
        std::vector<std::uint32_t> outside;
        outside.reserve(p - k);
        for (std::uint32_t r = 0; r < p; ++r) {
            if (!s.contains(r)) outside.push_back(r);
        }
        ResidueSet moved = s;
        moved.erase(members[g.bounded(k)]);
        moved.insert(outside[g.bounded(p - k)]);
        GridFamily cand = grid.with_set(c, moved);
        const std::int64_t cand_size = image_size(map, cand, 1, config.cell_cap);
        if (cand_size <= size) {
            grid = std::move(cand);
            size = cand_size;
        }
    }
    return {std::move(grid), size};
}

} // namespace detail

/// Seeded stochastic minimization. Every iteration runs from its own
/// derived sub-seed, so splitting iterations across workers cannot change
/// any individual descent; the reduction by (size, iteration index) makes
/// the final record independent of the worker count.
inline ExtremalRecord random_search(const SearchConfig& config, const MatrixFp& map) {
    if (config.mode != SearchMode::Random) throw ValueError("config is not random mode");
    if (config.iterations < 1) throw ValueError("random search needs iterations >= 1");
    if (config.mod != map.modulus()) throw ValueError("modulus mismatch");
    if (static_cast<int>(config.shape.size()) != map.cols()) {
        throw ValueError("shape length must equal the number of columns");
    }
    for (auto k : config.shape) {
        if (k < 1 || k > static_cast<std::int64_t>(config.mod.value())) {
            throw ValueError("set size out of range [1, p]");
        }
    }

    struct LaneBest {
        std::int64_t size = -1;
        std::int64_t iteration = 0;
        std::optional<GridFamily> grid;
    };

    const std::int64_t iters = config.iterations;
    const int lanes = static_cast<int>(
        std::min<std::int64_t>(std::max(config.workers, 1), iters));
    std::vector<LaneBest> bests(static_cast<std::size_t>(lanes));

    auto run = [&](std::int64_t lo, std::int64_t hi, LaneBest* best) {
        for (std::int64_t it = lo; it < hi; ++it) {
            auto [grid, size] =
                detail::hill_descent(map, config, sub_seed(config.seed, static_cast<std::uint64_t>(it)));
            if (best->size < 0 || size < best->size) {
                best->size = size;
                best->iteration = it;
                best->grid = std::move(grid);
            }
        }
    };

    if (lanes <= 1) {
        run(0, iters, &bests[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(lanes));
        for (int t = 0; t < lanes; ++t) {
            const std::int64_t lo = iters * t / lanes;
            const std::int64_t hi = iters * (t + 1) / lanes;
            pool.emplace_back(run, lo, hi, &bests[static_cast<std::size_t>(t)]);
        }
        for (auto& th : pool) th.join();
    }

    const LaneBest* winner = nullptr;
    for (const auto& b : bests) {
        if (b.size < 0) continue;
        if (!winner || b.size < winner->size ||
            (b.size == winner->size && b.iteration < winner->iteration)) {
            winner = &b;
        }
    }
    if (!winner) throw Error("internal: random search produced no candidate");
    return make_extremal_record(map, *winner->grid, winner->size);
}

/// Side-by-side evidence for the open window (p+1)/2 <= k <= ceil(2p/3):
/// the exact interval-grid image, the theorem bound, and the smallest
/// image any search found. Gaps are reported, never adjudicated.
struct ConjectureReport {
    explicit ConjectureReport(PrimeModulus modulus) : mod(modulus) {}

    PrimeModulus mod;
    std::int64_t k = 0;
    std::int64_t interval_image = 0;
    std::int64_t theorem_bound = 0;
    std::int64_t search_min = 0;
    std::optional<std::int64_t> exhaustive_min;
    std::int64_t gap_interval_vs_bound = 0; // interval_image - theorem_bound
    std::int64_t gap_search_vs_interval = 0; // search_min - interval_image
    std::int64_t iterations = 0;
    std::uint64_t seed = 0;
};

inline ConjectureReport conjecture_gap_report(PrimeModulus mod, std::int64_t k,
                                              std::int64_t iterations, std::uint64_t seed,
                                              int workers = 1,
                                              std::uint64_t family_cap = kDefaultFamilyCap,
                                              std::uint64_t cell_cap = kDefaultCellCap) {
    const std::int64_t p = mod.value();
    const std::int64_t lo = (p + 1) / 2;
    const std::int64_t hi = (2 * p + 2) / 3; // ceil(2p/3)
    if (k < lo || k > hi) {
        throw ScopeError("k = " + std::to_string(k) + " outside the window [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "] for p = " +
                         std::to_string(p));
    }

    ConjectureReport rep{mod};
    rep.k = k;
    rep.iterations = iterations;
    rep.seed = seed;

    const GridFamily intervals =
        GridFamily::uniform(mod, 3, interval_set(mod, static_cast<std::uint32_t>(k)));
    rep.interval_image = star_image_fast(intervals, cell_cap).size();
    rep.theorem_bound = *large_k_bound(mod, k).value;

    const MatrixFp star = star_matrix(mod, 3);
    SearchConfig cfg{mod,  {k, k, k},  SearchMode::Random, iterations,
                     seed, workers,    family_cap,         cell_cap};
    const ExtremalRecord found = random_search(cfg, star);
    rep.search_min = found.image_size;

    const auto families = count_families(mod, cfg.shape);
    if (families && *families <= family_cap) {
        SearchConfig exh = cfg;
        exh.mode = SearchMode::Exhaustive;
        rep.exhaustive_min = exhaustive_min_image(exh, star).image_size;
    }

    rep.gap_interval_vs_bound = rep.interval_image - rep.theorem_bound;
    rep.gap_search_vs_interval = rep.search_min - rep.interval_image;
    return rep;
}

} // namespace gridimage
