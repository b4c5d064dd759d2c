#include <catch2/catch_amalgamated.hpp>

#include "gridimage/bounds.hpp"

using namespace gridimage;

namespace {

MatrixFp mat(std::uint32_t p, const std::vector<std::vector<std::uint32_t>>& rows) {
    return MatrixFp::from_rows(PrimeModulus(p), rows);
}

} // namespace

TEST_CASE("star bound") {
    const BoundReport a = star_bound({2, 2, 2}, PrimeModulus(5));
    CHECK(a.applicable);
    CHECK(a.value == 7); // 8 - 1

    const BoundReport b = star_bound({4, 4, 4}, PrimeModulus(7));
    CHECK(b.applicable); // 4 + 4 <= 8
    CHECK(b.value == 37); // 64 - 27

    // two sets: the formula collapses to s1 + s2 - 1
    for (std::int64_t s1 = 1; s1 <= 5; ++s1)
        for (std::int64_t s2 = 1; s2 <= 5; ++s2) {
            const BoundReport r = star_bound({s1, s2}, PrimeModulus(11));
            REQUIRE(r.applicable);
            CHECK(r.value == s1 + s2 - 1);
        }

    const BoundReport c = star_bound({4, 4, 4}, PrimeModulus(5));
    CHECK_FALSE(c.applicable); // 4 + 4 > 6
    CHECK_FALSE(c.value.has_value());
    CHECK_FALSE(c.reason.empty());
    REQUIRE(c.preconditions.size() == 1);
    CHECK_FALSE(c.preconditions[0].holds);

    CHECK_THROWS_AS(star_bound({2}, PrimeModulus(5)), ValueError);
    CHECK_THROWS_AS(star_bound({0, 2}, PrimeModulus(5)), ValueError);
    CHECK_THROWS_AS(star_bound({2, 6}, PrimeModulus(5)), ValueError);
}

TEST_CASE("main theorem bound") {
    const PrimeModulus p(7);
    // full support reduces to the star formula
    const BoundReport full = main_theorem_bound({2, 2, 2}, {0, 1, 2}, p);
    CHECK(full.applicable);
    CHECK(full.value == 7);
    CHECK(*full.value == *star_bound({2, 2, 2}, p).value);

    // support {1,3} (0-based {0,2}): free coordinate multiplies through
    const BoundReport part = main_theorem_bound({2, 2, 2}, {0, 2}, p);
    CHECK(part.applicable);
    CHECK(part.value == 6); // 2 * (4 - 1)

    // all sizes 1: single point
    CHECK(main_theorem_bound({1, 1, 1}, {0, 1, 2}, p).value == 1);

    const BoundReport off = main_theorem_bound({3, 4, 3}, {0, 1, 2}, p);
    CHECK_FALSE(off.applicable); // 3 + 4 = 7 is not < 7
    CHECK_FALSE(off.value.has_value());

    CHECK_THROWS_AS(main_theorem_bound({2, 2, 2}, {}, p), ValueError);
    CHECK_THROWS_AS(main_theorem_bound({2, 2, 2}, {3}, p), ValueError);
}

TEST_CASE("large-k bound") {
    CHECK(large_k_bound(PrimeModulus(7), 4).value == 37);  // min(49+48-60, 49)
    CHECK(large_k_bound(PrimeModulus(7), 5).value == 49);  // capped at p^2
    CHECK(large_k_bound(PrimeModulus(13), 8).value == 145); // 169+192-216

    const BoundReport off = large_k_bound(PrimeModulus(7), 3);
    CHECK_FALSE(off.applicable); // 2k = 6 < 8
    CHECK_FALSE(off.value.has_value());

    CHECK_THROWS_AS(large_k_bound(PrimeModulus(7), 0), ValueError);
    CHECK_THROWS_AS(large_k_bound(PrimeModulus(7), 8), ValueError);
}

TEST_CASE("boundary identity at p = 2k - 1") {
    for (std::uint32_t p : {5u, 7u, 11u, 13u, 61u}) {
        const PrimeModulus mod(p);
        const std::int64_t k = (static_cast<std::int64_t>(p) + 1) / 2;
        CHECK(*large_k_bound(mod, k).value == *star_bound({k, k, k}, mod).value);
        CHECK(*large_k_bound(mod, k).value == 3 * k * k - 3 * k + 1);
    }
    // the formulas are pure integers, so a large prime works with a raised cap
    const PrimeModulus big(999983, 1'000'000);
    const std::int64_t k = (999983 + 1) / 2;
    CHECK(*large_k_bound(big, k).value == 3 * k * k - 3 * k + 1);
}

TEST_CASE("cover condition") {
    const PrimeModulus p(5);
    const BoundReport yes = cover_condition(p, 3, {4, 4, 4});
    CHECK(yes.applicable); // 2*4 + 4 = 12 >= 11
    CHECK(yes.value == 25);
    REQUIRE(yes.preconditions.size() == 2);
    CHECK(yes.preconditions[0].holds);
    CHECK(yes.preconditions[1].holds); // n*k = 12 > (n-1)*p = 10

    const BoundReport no = cover_condition(p, 3, {4, 4, 2});
    CHECK_FALSE(no.applicable); // 10 < 11
    CHECK_FALSE(no.value.has_value());

    const BoundReport mixed = cover_condition(p, 3, {3, 3, 5});
    CHECK(mixed.applicable); // 6 + 5 = 11 >= 11
    CHECK(mixed.value == 25);

    const BoundReport pair = cover_condition(PrimeModulus(7), 2, {4, 4});
    CHECK(pair.applicable); // 4 + 4 = 8 >= 8
    CHECK(pair.value == 7);

    CHECK_THROWS_AS(cover_condition(p, 3, {3, 4, 5}), NonUniformSizesError);
    CHECK_THROWS_AS(cover_condition(p, 1, {4}), ValueError);
    CHECK_THROWS_AS(cover_condition(p, 3, {4, 4}), ValueError);
}

TEST_CASE("fiber bounds") {
    CHECK(fiber_bounds(4, 4, PrimeModulus(7)) == std::pair<std::int64_t, std::int64_t>{1, 4});
    CHECK(fiber_bounds(2, 3, PrimeModulus(7)) == std::pair<std::int64_t, std::int64_t>{0, 2});
    CHECK(fiber_bounds(7, 5, PrimeModulus(7)) == std::pair<std::int64_t, std::int64_t>{5, 5});
    CHECK_THROWS_AS(fiber_bounds(8, 5, PrimeModulus(7)), ValueError);
}

TEST_CASE("best bound picks the main theorem on small shapes") {
    const BoundReport r = best_bound(star_matrix(PrimeModulus(7), 3), {2, 2, 2});
    CHECK(r.theorem == Theorem::MainTheorem);
    CHECK(r.applicable);
    CHECK(r.value == 7);
    // the star lemma ties at 7 but the main theorem is listed first
    bool saw_star = false;
    for (const auto& c : r.candidates) {
        if (c.theorem == Theorem::StarLemma) {
            saw_star = true;
            CHECK(c.value == 7);
        }
    }
    CHECK(saw_star);
}

TEST_CASE("best bound at large uniform sizes caps at p^2") {
    const BoundReport r = best_bound(star_matrix(PrimeModulus(7), 3), {5, 5, 5});
    CHECK(r.applicable);
    CHECK(r.value == 49);
    CHECK(r.theorem == Theorem::LargeK); // ties with Cover, earliest wins
    bool saw_cover = false;
    for (const auto& c : r.candidates) {
        if (c.theorem == Theorem::Cover) {
            saw_cover = true;
            CHECK(c.value == 49);
        }
    }
    CHECK(saw_cover);
}

TEST_CASE("best bound lists large-k among candidates at the window edge") {
    const BoundReport r = best_bound(star_matrix(PrimeModulus(7), 3), {4, 4, 4});
    CHECK(r.applicable);
    CHECK(r.value == 37);
    CHECK(r.theorem == Theorem::StarLemma); // ties with LargeK, earliest wins
    bool saw_large_k = false;
    for (const auto& c : r.candidates) {
        if (c.theorem == Theorem::LargeK) {
            saw_large_k = true;
            CHECK(c.applicable);
            CHECK(c.value == 37);
        }
    }
    CHECK(saw_large_k);
}

TEST_CASE("best bound on two coordinates starts with Cauchy-Davenport") {
    const BoundReport r = best_bound(mat(5, {{1, 1}}), {3, 3});
    CHECK(r.theorem == Theorem::CauchyDavenport);
    CHECK(r.value == 5);
    REQUIRE_FALSE(r.candidates.empty());
    CHECK(r.candidates.front().theorem == Theorem::CauchyDavenport);
}

TEST_CASE("best bound refuses rank-deficient maps") {
    const BoundReport r = best_bound(mat(5, {{1, 1}, {2, 2}}), {2, 2});
    CHECK(r.theorem == Theorem::None);
    CHECK_FALSE(r.applicable);
    CHECK(r.reason == "out of theorem scope");
    CHECK_FALSE(r.value.has_value());

    const BoundReport wide = best_bound(mat(5, {{1, 0, 1, 1}, {0, 1, 1, 0}}), {2, 2, 2, 2});
    CHECK(wide.theorem == Theorem::None);
    CHECK_FALSE(wide.applicable);
}

TEST_CASE("best bound reports None when no precondition holds") {
    // rank is fine but every size precondition fails: min+max too large,
    // sizes non-uniform so LargeK is out, star map but cover short
    const BoundReport r = best_bound(star_matrix(PrimeModulus(7), 3), {5, 5, 4});
    CHECK(r.theorem == Theorem::None);
    CHECK_FALSE(r.applicable);
    CHECK_FALSE(r.candidates.empty());
    for (const auto& c : r.candidates) CHECK_FALSE(c.applicable);
}

TEST_CASE("best bound skips the cover candidate when the prefix is not uniform") {
    // (3,2,2) has a non-uniform leading pair, so Cover must be left out
    // entirely instead of raising from inside the candidate sweep
    const BoundReport r = best_bound(star_matrix(PrimeModulus(3), 3), {3, 2, 2});
    CHECK(r.theorem == Theorem::None);
    CHECK_FALSE(r.applicable);
    for (const auto& c : r.candidates) CHECK(c.theorem != Theorem::Cover);
}

TEST_CASE("best bound validates sizes") {
    CHECK_THROWS_AS(best_bound(star_matrix(PrimeModulus(7), 3), {2, 2}), ValueError);
    CHECK_THROWS_AS(best_bound(star_matrix(PrimeModulus(7), 3), {2, 2, 8}), ValueError);
}
