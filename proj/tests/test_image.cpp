#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "gridimage/image.hpp"
#include "gridimage/rng.hpp"

using namespace gridimage;

namespace {

MatrixFp mat(std::uint32_t p, const std::vector<std::vector<std::uint32_t>>& rows) {
    return MatrixFp::from_rows(PrimeModulus(p), rows);
}

GridFamily cube01(std::uint32_t p, int n) {
    const PrimeModulus mod(p);
    return GridFamily::uniform(mod, n, ResidueSet::of(mod, {0, 1}));
}

} // namespace

TEST_CASE("image set indexing is little-endian in the first coordinate") {
    const ImageSet img(PrimeModulus(5), 2);
    CHECK(img.cells() == 25);
    CHECK(img.encode({2, 3}) == 17); // 2 + 3*5
    CHECK(img.decode(17) == std::vector<std::uint32_t>{2, 3});
    CHECK_THROWS_AS(img.encode({5, 0}), ValueError);
    CHECK_THROWS_AS(img.encode({0}), ValueError);
    CHECK_THROWS_AS(img.decode(25), ValueError);
}

TEST_CASE("image set bit plumbing") {
    ImageSet img(PrimeModulus(11), 2); // 121 cells, crosses a word boundary
    img.set(0);
    img.set(63);
    img.set(64);
    img.set(120);
    CHECK(img.size() == 4);
    CHECK(img.test(63));
    CHECK_FALSE(img.test(62));
    CHECK(img.indices() == std::vector<std::uint64_t>{0, 63, 64, 120});

    // or_word_at straddling a word boundary
    ImageSet other(PrimeModulus(11), 2);
    other.or_word_at(60, 0b10011);
    CHECK(other.indices() == std::vector<std::uint64_t>{60, 61, 64});

    ImageSet merged(PrimeModulus(11), 2);
    merged.merge_or(img);
    merged.merge_or(other);
    CHECK(merged.size() == 6); // 64 is shared
    CHECK_THROWS_AS(merged.merge_or(ImageSet(PrimeModulus(11), 1)), ValueError);
}

TEST_CASE("cell cap") {
    CHECK(required_cells(5, 3) == 125);
    CHECK_THROWS_AS(ImageSet(PrimeModulus(61), 6), CapError);     // 61^6 > 2^30
    CHECK_THROWS_AS(ImageSet(PrimeModulus(5), 3, 100), CapError); // per-call cap
    CHECK_THROWS_AS(required_cells(61, 11), CapError);            // overflow guard
}

TEST_CASE("star image on the 0-1 cube over F_5") {
    const GridFamily grid = cube01(5, 3);
    const ImageSet img = image(star_matrix(PrimeModulus(5), 3), grid);
    CHECK(img.size() == 7);
    // z=0 contributes {0,1}^2; z=1 adds (1,2),(2,1),(2,2)
    for (auto pt : {std::vector<std::uint32_t>{0, 0}, {1, 0}, {0, 1}, {1, 1},
                    {1, 2}, {2, 1}, {2, 2}}) {
        CHECK(img.test(img.encode(pt)));
    }
    CHECK(star_image_fast(grid) == img);
    CHECK(image_size(star_matrix(PrimeModulus(5), 3), grid) == 7);
}

TEST_CASE("identity map reproduces the grid") {
    const PrimeModulus p(5);
    const GridFamily grid(p, {ResidueSet::of(p, {0, 1}), ResidueSet::of(p, {0, 2})});
    const ImageSet img = image(MatrixFp::identity(p, 2), grid);
    CHECK(img.size() == 4);
    CHECK(img.test(img.encode({1, 2})));
    CHECK_FALSE(img.test(img.encode({1, 1})));
}

TEST_CASE("product-structure image") {
    // (x+z, y): x+z covers {0,1,2}, y covers {0,1}
    CHECK(image_size(mat(5, {{1, 0, 1}, {0, 1, 0}}), cube01(5, 3)) == 6);
}

TEST_CASE("full cover instance") {
    const PrimeModulus p(5);
    const GridFamily grid = GridFamily::uniform(p, 3, interval_set(p, 4));
    CHECK(star_image_fast(grid).size() == 25);
}

TEST_CASE("surjective map on the full grid hits everything") {
    const PrimeModulus p(7);
    const GridFamily grid = GridFamily::uniform(p, 3, ResidueSet::full(p));
    CHECK(image_size(star_matrix(p, 3), grid) == 49);
}

TEST_CASE("singleton last coordinate is a plain shift") {
    const PrimeModulus p(7);
    const GridFamily grid(p, {ResidueSet::of(p, {0, 2, 3}), ResidueSet::of(p, {1, 4}),
                              ResidueSet::of(p, {5})});
    const ImageSet img = star_image_fast(grid);
    CHECK(img.size() == 6); // (A_1+5) x (A_2+5)
    CHECK(img.test(img.encode({5, 6})));
    CHECK(img.test(img.encode({1, 2})));
}

TEST_CASE("worker count never changes the image") {
    SplitMix64 g(7);
    for (int trial = 0; trial < 20; ++trial) {
        const PrimeModulus mod(11);
        const MatrixFp m = random_matrix(g, mod, 2, 3);
        std::vector<ResidueSet> sets;
        for (int c = 0; c < 3; ++c) sets.push_back(random_nonempty_set(g, mod));
        const GridFamily grid(mod, std::move(sets));
        const ImageSet one = image(m, grid, 1);
        CHECK(image(m, grid, 3) == one);
        CHECK(image(m, grid, 16) == one);
    }
}

TEST_CASE("enlarging a set never shrinks the image") {
    SplitMix64 g(13);
    const PrimeModulus mod(11);
    for (int trial = 0; trial < 30; ++trial) {
        const MatrixFp m = random_matrix(g, mod, 2, 3);
        std::vector<ResidueSet> sets;
        for (int c = 0; c < 3; ++c) sets.push_back(random_nonempty_set(g, mod));
        GridFamily grid(mod, std::move(sets));
        std::int64_t last = image_size(m, grid);
        const int c = static_cast<int>(g.bounded(3));
        for (std::uint32_t r = 0; r < 11; ++r) {
            if (grid.set(c).contains(r)) continue;
            ResidueSet bigger = grid.set(c);
            bigger.insert(r);
            grid = grid.with_set(c, bigger);
            const std::int64_t next = image_size(m, grid);
            CHECK(next >= last);
            last = next;
        }
    }
}

TEST_CASE("translation leaves the image size unchanged") {
    SplitMix64 g(17);
    const PrimeModulus mod(13);
    for (int trial = 0; trial < 30; ++trial) {
        const MatrixFp m = random_matrix(g, mod, 2, 3);
        std::vector<ResidueSet> sets, shifted;
        for (int c = 0; c < 3; ++c) {
            sets.push_back(random_nonempty_set(g, mod));
            shifted.push_back(translate(sets.back(), static_cast<std::uint32_t>(g.bounded(13))));
        }
        CHECK(image_size(m, GridFamily(mod, sets)) == image_size(m, GridFamily(mod, shifted)));
    }
}

TEST_CASE("image input validation") {
    const PrimeModulus p(5);
    const GridFamily grid = cube01(5, 3);
    CHECK_THROWS_AS(image(mat(5, {{1, 1}}), grid), ValueError); // arity mismatch
    CHECK_THROWS_AS(image(mat(7, {{1, 1, 1}}), grid), ValueError);
    CHECK_THROWS_AS(image(star_matrix(p, 3), grid.with_set(1, ResidueSet(p))), ValueError);
    CHECK_THROWS_AS(image(star_matrix(p, 3), grid, 0), ValueError);
}

TEST_CASE("fiber profile of the worked pair") {
    const PrimeModulus p(5);
    const ResidueSet xy = ResidueSet::of(p, {0, 1});
    const FiberProfile prof = fiber_counts(xy, xy);
    CHECK(prof.counts == std::vector<std::int64_t>{1, 2, 1, 0, 0});
    CHECK(prof.total() == 4);
}

TEST_CASE("full X forces every fiber to |Y|") {
    const PrimeModulus p(7);
    const ResidueSet y = ResidueSet::of(p, {1, 3, 4});
    const FiberProfile prof = fiber_counts(ResidueSet::full(p), y);
    for (auto t : prof.counts) CHECK(t == 3);
    CHECK(prof.total() == 21);
}

TEST_CASE("fiber totals on random pairs") {
    SplitMix64 g(19);
    for (int trial = 0; trial < 200; ++trial) {
        const PrimeModulus mod(13);
        const ResidueSet x = random_nonempty_set(g, mod);
        const ResidueSet y = random_nonempty_set(g, mod);
        CHECK(fiber_counts(x, y).total() == static_cast<std::int64_t>(x.size()) * y.size());
    }
}
