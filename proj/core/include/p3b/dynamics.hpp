#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <vector>

#include "p3b/errors.hpp"

namespace p3b {

using cplx = std::complex<double>;

// Three unit masses in the plane, positions as complex numbers.
// Masses and the force coupling are fixed to 1; any other choice is a
// rescaling under the problem's scaling symmetry.
struct PlanarConfig {
    std::array<cplx, 3> q;

    bool is_centered(double tol = 1e-12) const;
    PlanarConfig centered() const;  // shift center of mass to the origin
    double min_pair_distance() const;
};

struct PlanarState {
    PlanarConfig config;
    std::array<cplx, 3> v;
};

struct ConservedQuantities {
    double E;     // total energy
    double C;     // angular momentum
    double I;     // moment of inertia (about the center of mass frame origin)
    double Idot;  // d/dt of I
};

inline constexpr double kCollisionGuard = 1e-6;

// U = sum over pairs of 1/r^2. Throws DegenerateConfiguration below the guard.
double potential(const PlanarConfig& config, double guard = kCollisionGuard);

// Right-hand side of the equations of motion: the planar gradient of U per
// body, packaged as dU/dx + i dU/dy.
std::array<cplx, 3> acceleration(const PlanarConfig& config, double guard = kCollisionGuard);

ConservedQuantities conserved_quantities(const PlanarState& state);

struct TrajectorySample {
    double t;
    PlanarState state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double tol = 0.0;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    // Set when a pair distance fell below the guard radius and integration
    // stopped early with a partial trajectory.
    bool collision_approach = false;
};

// Adaptive integration of the equations of motion up to t_end.
Trajectory integrate(const PlanarState& initial, double t_end, double tol,
                     double guard = kCollisionGuard, double max_step = 0.05);

// Max over samples of |I'' - 4E| with I'' evaluated analytically from the ODE
// right-hand side. An identity of the flow, so this measures only roundoff.
double lagrange_jacobi_residual(const Trajectory& traj);

// I'' at a single state, from the right-hand side.
double inertia_second_derivative(const PlanarState& state);

// CSV export, header t,x1,y1,...,E,C,I, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

// Parses a whitespace-separated list of 12 numbers:
// x1 y1 x2 y2 x3 y3 vx1 vy1 vx2 vy2 vx3 vy3
PlanarState read_state(std::istream& in);

}  // namespace p3b
