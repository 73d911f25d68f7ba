#pragma once

#include <optional>
#include <vector>

#include "p3b/dynamics.hpp"
#include "p3b/geodesic.hpp"

namespace p3b {

// One sample of a lifted orbit: JM arclength sigma, physical time t, and the
// centered I = 1 configuration with physical velocities.
struct LiftPoint {
    double sigma = 0.0;
    double t = 0.0;
    PlanarState state;
};

struct LiftedOrbit {
    std::vector<LiftPoint> points;
    Trajectory trajectory;  // the same samples keyed by physical time
    ReducedPath source;
    bool truncated_start = false;   // lift begins after the source path does
    bool truncated_finish = false;  // lift stops at the metric cusp guard
    std::optional<End> start_end, finish_end;  // from the source tails
};

struct ResidualReport {
    double eq1_residual = 0.0;  // max relative |d2q/dt2 - grad U| (FD oracle)
    int eq1_worst_sample = -1;
    int eq1_samples_checked = 0;
    double max_abs_E = 0.0;
    double max_abs_C = 0.0;
    double max_abs_I_err = 0.0;
    double max_horizontality = 0.0;  // max of |<c',c>|, |<c',ic>| (sigma-param)
    bool pair_distance_monotone = false;
    double final_pair_distance = 0.0;
    double t_collision = 0.0;
    bool t_collision_converged = false;
    bool passed = false;
};

// Horizontal lift of a reduced path: re-integrates the geodesic in Hopf
// coordinates z in C^2 (shape = Hopf(z) exactly, I = |z|^2 = 1), transported
// perpendicular to the rotation fiber, together with the physical clock
// dt = dsigma / (sqrt2 * U). Velocities are q' scaled to |v|^2 = 2U, so
// E = 0 holds by construction. The lift starts at the first sample outside
// the metric cusp guard and stops on re-entering it (truncation flags).
LiftedOrbit horizontal_lift(const ReducedPath& path, double tol = 1e-12);

// Residual report against Eq. 1 and the conservation laws; the second
// derivative is a 5-point Fornberg stencil on the nonuniform t grid,
// evaluated where the stencil is wide enough to be conditioned
// (span >= 5e-4). passed = eq1 residual <= tol and all conservation bars.
ResidualReport verify_solution(const LiftedOrbit& lifted, double tol = 1e-5);

}  // namespace p3b
