#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "p3b/geodesic.hpp"
#include "p3b/syzygy.hpp"

namespace p3b {

struct ShotInfo {
    double d0 = 0.0;        // launch depth
    double phi_star = 0.0;  // launch angle
    double window = 0.0;    // final bisection window width
};

struct CollisionOrbit {
    ReducedPath path;
    End start_end = End::B12;
    End finish_end = End::B12;
    SyzygySequence realized;  // stutter-free; tails included for winding orbits
    ShotInfo shot;
    TailClass start_tail, finish_tail;
    std::string mirror_of;  // orbit id this one mirrors, if any
    std::string id;
};

struct FindOptions {
    double d0 = 5.0;
    int grid = 720;
    int bisect_steps = 60;
    double window_tol = 1e-10;
    double horizon_length = 40.0;
    double horizon_depth = 8.0;
    double flow_tol = 1e-11;
    int workers = 1;
};

// (start, finish) ends forced by a finite stutter-free target: the start end
// must be opposite arc s1 (its two adjacent arcs both differ from s1, so the
// geodesic can reach s1 without an earlier crossing), likewise the finish end
// opposite sk.
std::pair<End, End> resolve_ends(const SyzygySequence& target);

struct ScanEntry {
    double phi = 0.0;
    SyzygySequence code;  // raw truncated crossing list
    TailClass tail;       // finish-side classification
    int predicate = 0;    // +1/-1 = first finish-tail symbol side, 0 = undefined
};

// Launches n geodesics outward from the depth-d0 cross-section of start_end
// at equispaced phi and records truncated code + tail class. finish_end
// fixes the bisection predicate orientation.
std::vector<ScanEntry> scan(End start_end, End finish_end,
                            const std::vector<int>& target_symbols,
                            const FindOptions& options = {});

// Shooting + bisection for the two straight collision orbits realizing a
// finite stutter-free target (the second is the mirror partner, found by an
// independent bisection of the reflected bracket). Throws InvalidInput for
// stuttered/empty targets and ResolutionExceeded if no bracket is found at
// grid resolution.
std::pair<CollisionOrbit, CollisionOrbit> find_straight(const SyzygySequence& target,
                                                        const FindOptions& options = {});

// Winding family: perturbs the tangent of a straight orbit at its
// mid-arclength sample by angles +-eps*j/count and integrates both ways until
// the tails have shown a few windings. eps = 0 returns {straight}.
std::vector<CollisionOrbit> find_winding(const CollisionOrbit& straight, double eps,
                                         int count, const FindOptions& options = {});

inline constexpr double kEpsMax = 0.05;

// Reflection isometry u3 -> -u3 applied sample-wise.
CollisionOrbit mirror(const CollisionOrbit& orbit);
ReducedPath mirror(const ReducedPath& path);

// Max pointwise distance between the core-chart portions of two paths, after
// aligning arclength origins at the first core sample of each.
double aligned_core_distance(const ReducedPath& a, const ReducedPath& b);
// Max pointwise distance without alignment (distinctness check).
double max_pointwise_distance(const ReducedPath& a, const ReducedPath& b);

// Clear iff the tiling word of the orbit's core sequence never re-enters a
// lifted domain through the seam it just crossed (no adjacent +a, -a pair).
bool seam_double_crossing_flag(const SyzygySequence& realized);

}  // namespace p3b
