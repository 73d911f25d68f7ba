#pragma once

#include <string>
#include <vector>

#include "p3b/geodesic.hpp"

namespace p3b {

// A syzygy sequence: the temporal list of collinear-arc labels crossed by a
// reduced path. Tails observed only up to a finite horizon are marked
// truncated; left_tail/right_tail give how many leading/trailing symbols
// belong to a truncated tail (for serialization "...2323|31|3232...").
struct SyzygySequence {
    enum Kind { Finite, SemiInfiniteTruncated, BiInfiniteTruncated };

    std::vector<int> symbols;
    Kind kind = Finite;
    bool stutter_free = false;
    std::size_t left_tail = 0;
    std::size_t right_tail = 0;

    std::string str() const;
    static SyzygySequence parse(const std::string& text);

    bool operator==(const SyzygySequence&) const = default;
};

// An equator crossing of a reduced path.
struct Crossing {
    double sigma = 0.0;
    int arc = 0;
    bool in_cusp = false;
    End end = End::B12;  // meaningful when in_cusp
};

// Locates all transversal sign changes of u3 along the path. Core-chart
// crossings are found by cubic Hermite bracketing + bisection (1e-10 in
// sigma); leg-chart crossings are the passages of phi through multiples of
// pi, which are exact in the chart. Grazing contacts (no sign change) are
// ignored. Throws AmbiguousCrossing if a core-chart crossing lies within
// 1e-6 angular distance of a collision point.
std::vector<Crossing> detect_crossings(const ReducedPath& path);

// Arc crossed at phi = k*pi in the leg chart of the given end.
int cusp_crossing_arc(End end, long k);

// Syzygy sequence of a path (raw, not stutter-cancelled, kind = Finite).
SyzygySequence code(const ReducedPath& path);

// Deletes adjacent equal pairs to a fixed point. Idempotent.
SyzygySequence cancel_stutters(const SyzygySequence& seq);

enum class Region { Lower, Upper };

// Fundamental-domain address word of a stutter-free finite sequence. The
// pair of pants is opened along seams 1 and 2: crossing seam a in {1,2}
// from the lower side appends +a, from the upper side appends -a; crossing
// seam 3 switches side without leaving the domain pair, so it appends
// nothing. Throws InvalidInput if the input is not stutter-free or not
// finite.
std::vector<int> tiling_word(const SyzygySequence& seq, Region start_region);

}  // namespace p3b
