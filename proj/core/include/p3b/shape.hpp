#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include "p3b/dynamics.hpp"
#include "p3b/vec3.hpp"

namespace p3b {

// The shape sphere: centered configurations modulo rotation and scaling form
// the unit sphere minus the three binary-collision points. Collinear shapes
// form the equator u3 = 0; the two hemispheres are the two planar
// orientations of the triangle.
struct ShapePoint {
    Vec3 u;  // unit vector
};

enum class End { B12 = 0, B13 = 1, B23 = 2 };

// Unit vectors of the binary-collision points. They sit on the equator 120
// degrees apart: B12 at azimuth 180, B23 at +60, B13 at -60.
Vec3 collision_point(End end);
const char* end_name(End end);
End end_from_name(const std::string& name);

// The collinear arcs are labeled by the middle body. Arc m is the open
// equator arc bounded by the two collision points involving body m:
// arc 1 joins B12 and B13, arc 2 joins B12 and B23, arc 3 joins B13 and B23.
// In azimuth: arc 1 = (180, 300), arc 2 = (60, 180), arc 3 = (-60, 60).
int arc_at_azimuth(double azimuth);
std::pair<int, int> arcs_adjacent_to(End end);
std::pair<End, End> arc_endpoints(int arc);
// The collision point that is NOT an endpoint of the given arc, e.g. B12 for
// arc 3. A geodesic emerging from this end can cross the arc without first
// meeting one of the arc's own endpoints.
End end_opposite_arc(int arc);

// Equal-mass Jacobi coordinates: z1 = (q1-q2)/sqrt2, z2 = (q1+q2-2 q3)/sqrt6.
// |z1|^2 + |z2|^2 equals the moment of inertia. Throws NotCentered otherwise.
std::pair<cplx, cplx> jacobi_coords(const PlanarConfig& config);

// The Hopf map u = (|z1|^2-|z2|^2, 2 Re(z1 conj z2), 2 Im(z1 conj z2)) / I.
// Invariant under rotation and scaling of the configuration.
ShapePoint shape_map(const PlanarConfig& config, double guard = kCollisionGuard);

// Inverts the Hopf map to a centered configuration with I = 1, using the
// phase convention z1 real nonnegative away from B12 (z2 real nonnegative
// near B12). Any other choice differs by a global rotation.
PlanarConfig representative(const ShapePoint& point);

inline constexpr double kMetricCuspGuard = 1e-3;  // angular distance

// Conformal factor of the reduced Jacobi-Maupertuis metric over the round
// sphere of radius 1/2: lambda(u) = (I*U) at any centered representative,
// which evaluates in closed form to
//   lambda(u) = sum over collision points b of 1/(1 - <u,b>).
double conformal_lambda(const Vec3& u);

// Ambient gradient of lambda (to be projected onto the tangent plane).
Vec3 conformal_lambda_gradient(const Vec3& u);

// First and second derivative data of log lambda at a shape point, computed
// analytically. Gradient is given both as an ambient tangent 3-vector and as
// components in the local orthonormal frame (e1, e2). The Laplacian is taken
// with respect to the round metric of the UNIT sphere; the radius-1/2
// convention only rescales it by 4.
struct MetricData {
    double lambda;
    Vec3 grad_log_lambda;   // ambient, tangent to the sphere
    Vec3 frame_e1, frame_e2;
    double grad2[2];        // components of grad log lambda in (e1, e2)
    double lap_log_lambda;  // unit-sphere Laplace-Beltrami of log lambda
};

MetricData conformal_factor(const ShapePoint& point, double cusp_guard = kMetricCuspGuard);

// Gaussian curvature of the reduced metric lambda * g_round(1/2):
//   K = (K0 - (1/2) * Lap_{round(1/2)} log lambda) / lambda
//     = (4 - 2 * Lap_{unit} log lambda) / lambda,   K0 = 4.
double gaussian_curvature(const MetricData& data);
double gaussian_curvature(const ShapePoint& point, double cusp_guard = kMetricCuspGuard);

// Riemannian-submersion identity check: compares the upstairs JM norm
// U(q)*|w|^2 of a horizontal vector w with the reduced norm of its numerical
// pushforward under shape_map. Returns the relative discrepancy.
// w must be Euclidean-orthogonal to the rotation direction iq and the scaling
// direction q (residual > 1e-10 throws InvalidInput).
double submersion_check(const PlanarConfig& config, const std::array<cplx, 3>& w);

// Curvature map export: CSV "theta,phi,lambda,K" over an n_theta x n_phi
// spherical grid (theta polar from +z, phi azimuth). Grid nodes inside the
// cusp guard of a collision point are skipped.
void write_curvature_csv(std::ostream& out, int n_theta, int n_phi,
                         double cusp_guard = kMetricCuspGuard);

}  // namespace p3b
