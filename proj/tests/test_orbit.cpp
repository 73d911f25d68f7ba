#include <cmath>

#include <doctest.h>

#include "p3b/orbit.hpp"

using namespace p3b;

namespace {

// One find per test binary run; the acceptance suite covers the full table.
const std::pair<CollisionOrbit, CollisionOrbit>& found_31() {
    static auto pair = find_straight(SyzygySequence::parse("31"));
    return pair;
}

}  // namespace

TEST_CASE("resolve_ends picks the ends opposite the boundary symbols") {
    CHECK(resolve_ends(SyzygySequence::parse("31")) ==
          std::pair<End, End>(End::B12, End::B23));
    CHECK(resolve_ends(SyzygySequence::parse("1")) ==
          std::pair<End, End>(End::B23, End::B23));
    CHECK(resolve_ends(SyzygySequence::parse("123")) ==
          std::pair<End, End>(End::B23, End::B12));
    CHECK_THROWS_AS(resolve_ends(SyzygySequence::parse("11")), InvalidInput);
    CHECK_THROWS_AS(resolve_ends(SyzygySequence::parse("")), InvalidInput);
}

TEST_CASE("find_straight realizes the target 31 twice") {
    const auto& [o1, o2] = found_31();
    for (const CollisionOrbit* o : {&o1, &o2}) {
        CHECK(o->realized.symbols == std::vector<int>{3, 1});
        CHECK(o->realized.stutter_free);
        CHECK(o->start_end == End::B12);
        CHECK(o->finish_end == End::B23);
        CHECK(o->start_tail.kind == TailClass::Straight);
        CHECK(o->finish_tail.kind == TailClass::Straight);
        CHECK(o->start_tail.max_depth >= 8.0);
        CHECK(o->finish_tail.max_depth >= 8.0);
        CHECK(o->shot.window <= 1e-10);
        CHECK(o->shot.d0 == 5.0);
    }
    CHECK(o1.id == "31-S-0");
    CHECK(o2.id == "31-S-1");
    CHECK(o2.mirror_of == o1.id);
    // phi* of the pair are reflections of each other
    CHECK(o1.shot.phi_star == doctest::Approx(-o2.shot.phi_star).epsilon(1e-12));
}

TEST_CASE("the two orbits are mirror partners and distinct") {
    const auto& [o1, o2] = found_31();
    CHECK(aligned_core_distance(mirror(o1).path, o2.path) <= 1e-6);
    CHECK(max_pointwise_distance(o1.path, o2.path) > 0.1);
}

TEST_CASE("mirror is an involution") {
    const auto& [o1, o2] = found_31();
    ReducedPath twice = mirror(mirror(o1.path));
    REQUIRE(twice.samples.size() == o1.path.samples.size());
    for (std::size_t i = 0; i < twice.samples.size(); ++i) {
        CHECK(norm(twice.samples[i].u - o1.path.samples[i].u) <= 1e-15);
        CHECK(norm(twice.samples[i].w - o1.path.samples[i].w) <= 1e-15);
    }
    // mirrored path flips the hemisphere pointwise
    ReducedPath m = mirror(o1.path);
    for (std::size_t i = 0; i < m.samples.size(); ++i)
        CHECK(m.samples[i].u.z == doctest::Approx(-o1.path.samples[i].u.z));
}

TEST_CASE("find_straight rejects bad targets") {
    FindOptions fast;
    fast.grid = 64;
    CHECK_THROWS_AS(find_straight(SyzygySequence::parse("33"), fast), InvalidInput);
    CHECK_THROWS_AS(find_straight(SyzygySequence{}, fast), InvalidInput);
}

TEST_CASE("find_winding input validation") {
    const auto& [o1, o2] = found_31();
    CHECK_THROWS_AS(find_winding(o1, 0.1, 3), PerturbationTooLarge);
    CHECK_THROWS_AS(find_winding(o1, -1e-3, 3), PerturbationTooLarge);
    auto none = find_winding(o1, 0.0, 3);
    REQUIRE(none.size() == 1);
    CHECK(none[0].id == o1.id);
}

TEST_CASE("winding family of 31 keeps the core and winds both tails") {
    const auto& [o1, o2] = found_31();
    auto family = find_winding(o1, 1e-3, 1);
    REQUIRE(family.size() == 2);  // one per perturbation sign
    for (const CollisionOrbit& w : family) {
        CHECK(w.start_tail.kind == TailClass::Winding);
        CHECK(w.finish_tail.kind == TailClass::Winding);
        CHECK(w.start_end == End::B12);
        CHECK(w.finish_end == End::B23);
        CHECK(w.realized.kind == SyzygySequence::BiInfiniteTruncated);
        // core symbols between the truncated tails
        std::vector<int> core(w.realized.symbols.begin() + w.realized.left_tail,
                              w.realized.symbols.end() - w.realized.right_tail);
        CHECK(core == std::vector<int>{3, 1});
        // tails alternate the arcs adjacent to their end
        auto [a1, a2] = arcs_adjacent_to(w.start_end);
        for (std::size_t i = 0; i < w.realized.left_tail; ++i) {
            int s = w.realized.symbols[i];
            CHECK((s == a1 || s == a2));
            if (i > 0) CHECK(s != w.realized.symbols[i - 1]);
        }
    }
    CHECK(max_pointwise_distance(family[0].path, family[1].path) > 1e-6);
}

TEST_CASE("seam_double_crossing_flag") {
    SyzygySequence s31 = SyzygySequence::parse("31");
    CHECK(seam_double_crossing_flag(s31));
    // 121 re-enters through seam 1... the word is 1,-2,1: no adjacent +-a pair
    CHECK(seam_double_crossing_flag(SyzygySequence::parse("121")));
}
