#include <numbers>
#include <random>

#include <doctest.h>

#include "p3b/syzygy.hpp"

using namespace p3b;

namespace {

constexpr double kPi = std::numbers::pi;

SyzygySequence seq_of(std::vector<int> symbols) {
    SyzygySequence s;
    s.symbols = std::move(symbols);
    s.stutter_free = true;
    for (std::size_t i = 0; i + 1 < s.symbols.size(); ++i)
        if (s.symbols[i] == s.symbols[i + 1]) s.stutter_free = false;
    return s;
}

// Synthetic constant-depth loop around an end, phi from phi0 over dphi.
ReducedPath loop_around(End end, double phi0, double dphi, int n = 400) {
    ReducedPath path;
    for (int i = 0; i <= n; ++i) {
        PathSample s;
        s.sigma = i * std::abs(dphi) / n;
        s.chart = Chart::Cusp;
        s.end = end;
        s.depth = 1.0;
        s.phi = phi0 + dphi * i / n;
        s.dphi = dphi >= 0 ? 1.0 : -1.0;
        s.u = cusp_chart_inverse({end, s.depth, s.phi}).u;
        path.samples.push_back(s);
    }
    return path;
}

}  // namespace

TEST_CASE("serialization round trips") {
    CHECK(SyzygySequence::parse("31").str() == "31");
    CHECK(SyzygySequence::parse("31").symbols == std::vector<int>{3, 1});
    SyzygySequence bi = SyzygySequence::parse("...2323|31|3232...");
    CHECK(bi.kind == SyzygySequence::BiInfiniteTruncated);
    CHECK(bi.left_tail == 4);
    CHECK(bi.right_tail == 4);
    CHECK(bi.symbols == std::vector<int>{2, 3, 2, 3, 3, 1, 3, 2, 3, 2});
    CHECK(bi.str() == "...2323|31|3232...");
    SyzygySequence semi = SyzygySequence::parse("12|3131...");
    CHECK(semi.kind == SyzygySequence::SemiInfiniteTruncated);
    CHECK(semi.right_tail == 4);
    CHECK(semi.str() == "12|3131...");
    // UTF-8 ellipsis accepted on input
    CHECK(SyzygySequence::parse("…12|3…").symbols ==
          SyzygySequence::parse("...12|3...").symbols);
    CHECK_THROWS_AS(SyzygySequence::parse("1x2"), InvalidInput);
}

TEST_CASE("cancel_stutters examples") {
    CHECK(cancel_stutters(seq_of({1, 2, 2, 1})).symbols.empty());
    CHECK(cancel_stutters(seq_of({1, 2, 3, 3})).symbols == std::vector<int>{1, 2});
    CHECK(cancel_stutters(seq_of({3, 1})).symbols == std::vector<int>{3, 1});
    CHECK(cancel_stutters(seq_of({1, 1, 1})).symbols == std::vector<int>{1});
}

TEST_CASE("cancel_stutters is idempotent and leaves no stutter") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> sym(1, 3), len(0, 30);
    for (int k = 0; k < 300; ++k) {
        std::vector<int> w(len(rng));
        for (int& s : w) s = sym(rng);
        SyzygySequence once = cancel_stutters(seq_of(std::move(w)));
        for (std::size_t i = 0; i + 1 < once.symbols.size(); ++i)
            CHECK(once.symbols[i] != once.symbols[i + 1]);
        CHECK(cancel_stutters(once).symbols == once.symbols);
    }
}

TEST_CASE("cusp crossing arcs follow the adjacency parity") {
    CHECK(cusp_crossing_arc(End::B12, 0) == 1);
    CHECK(cusp_crossing_arc(End::B12, 1) == 2);
    CHECK(cusp_crossing_arc(End::B12, -1) == 2);
    CHECK(cusp_crossing_arc(End::B23, 2) == 2);
    CHECK(cusp_crossing_arc(End::B23, 3) == 3);
    CHECK(cusp_crossing_arc(End::B13, 0) == 3);
    CHECK(cusp_crossing_arc(End::B13, 1) == 1);
}

TEST_CASE("a loop around B12 codes alternating 1,2") {
    ReducedPath path = loop_around(End::B12, 0.4, 4 * kPi);  // two full turns
    SyzygySequence seq = code(path);
    REQUIRE(seq.symbols.size() == 4);
    CHECK(seq.symbols == std::vector<int>{2, 1, 2, 1});
    CHECK(seq.stutter_free);
    // reversed loop crosses the same arcs in reverse order
    SyzygySequence rev = code(loop_around(End::B12, 0.4 + 4 * kPi, -4 * kPi));
    CHECK(rev.symbols == std::vector<int>{1, 2, 1, 2});
}

TEST_CASE("core-chart crossings are located and labeled") {
    // geodesic crossing arc 3 near azimuth 0
    GeodesicState s = make_geodesic_state(
        normalized(Vec3{1, 0, 0.3}), Vec3{0, 0.2, -1});
    ReducedPath path = geodesic_flow(s, 1.0);
    auto crossings = detect_crossings(path);
    REQUIRE(crossings.size() == 1);
    CHECK(crossings[0].arc == 3);
    CHECK_FALSE(crossings[0].in_cusp);
    // the crossing sigma brackets the sign change of u3
    for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
        if ((path.samples[i].u.z >= 0) != (path.samples[i + 1].u.z >= 0)) {
            CHECK(crossings[0].sigma >= path.samples[i].sigma);
            CHECK(crossings[0].sigma <= path.samples[i + 1].sigma);
        }
    }
}

TEST_CASE("grazing contact is not a crossing") {
    // stay in the upper hemisphere, dip toward the equator and back
    GeodesicState s = make_geodesic_state(normalized(Vec3{1, 0, 0.2}), {0, 1, 0});
    ReducedPath path = geodesic_flow(s, 0.5);
    bool stayed_upper = true;
    for (const auto& smp : path.samples)
        if (smp.u.z < 0) stayed_upper = false;
    if (stayed_upper) CHECK(detect_crossings(path).empty());
}

TEST_CASE("tiling word opens seams 1 and 2 only") {
    CHECK(tiling_word(seq_of({3, 1}), Region::Lower) == std::vector<int>{-1});
    CHECK(tiling_word(seq_of({3, 1}), Region::Upper) == std::vector<int>{1});
    CHECK(tiling_word(seq_of({1, 2, 1}), Region::Lower) ==
          std::vector<int>{1, -2, 1});
    CHECK(tiling_word(seq_of({3}), Region::Lower).empty());
    CHECK_THROWS_AS(tiling_word(seq_of({1, 1}), Region::Lower), InvalidInput);
    SyzygySequence trunc = SyzygySequence::parse("...2|1|2...");
    CHECK_THROWS_AS(tiling_word(trunc, Region::Lower), InvalidInput);
}
