#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "p3b/shape.hpp"
#include "p3b/vec3.hpp"

namespace p3b {

// Reduced cusp-chart reference cross-section: the level set of angular
// distance 0.05 from the collision point. Chart switching happens here,
// with a small hysteresis band on the way out.
inline constexpr double kChartGuard = 0.05;
inline constexpr double kChartExit = 0.055;

// Point plus unit tangent of the reduced metric: lambda * |w|^2 / 4 = 1.
struct GeodesicState {
    Vec3 u;
    Vec3 w;
};

// Builds a unit-speed state from a point and a direction (projected to the
// tangent plane and normalized in the reduced metric).
GeodesicState make_geodesic_state(const Vec3& u, const Vec3& direction);

enum class Chart { Core, Cusp };

struct PathSample {
    double sigma = 0.0;
    Vec3 u{};
    Vec3 w{};
    Chart chart = Chart::Core;
    End end = End::B12;   // meaningful for cusp samples only
    double depth = 0.0;   // reduced distance past the reference cross-section
    double phi = 0.0;     // unwrapped angle around the leg
    double dell = 0.0;    // d(log theta)/d sigma, cusp samples
    double dphi = 0.0;    // d phi/d sigma, cusp samples
};

struct ReducedPath {
    std::vector<PathSample> samples;

    double length() const {
        return samples.empty() ? 0.0 : samples.back().sigma - samples.front().sigma;
    }
};

// Leg coordinates around a collision point: depth past the reference
// cross-section and angle phi, oriented so the upper region u3 > 0 is
// phi in (0, pi) and phi = 0 points along the equator toward increasing
// azimuth.
struct CuspChart {
    End end;
    double depth;
    double phi;
};

// Chart for a point inside some cusp-guard neighborhood; throws
// CuspGuardViolation if the point is in none.
CuspChart cusp_chart(const ShapePoint& point);
ShapePoint cusp_chart_inverse(const CuspChart& chart);

// Reduced distance from the reference cross-section to angular distance
// theta, measured along the radial line of constant phi. Positive going in.
double cusp_depth_from_theta(End end, double theta, double phi);
double cusp_theta_from_depth(End end, double depth, double phi);
// Same depth computed from log(theta); stays valid when theta underflows.
double cusp_depth_from_ell(End end, double ell, double phi);

// Length of the constant-depth circle. Bounded as depth grows (the legs are
// finite-diameter cylinders, circumference -> pi * sqrt2).
double cusp_cross_section_circumference(End end, double depth);

// Reduced metric in leg coordinates: ds^2 = A dl^2 + B dphi^2, l = log theta.
// Both coefficients tend to 1/2 down the leg and are evaluated in a form
// stable for arbitrarily small theta.
struct CuspMetric {
    double A, B;
};
CuspMetric cusp_metric(End end, double theta, double phi);

struct FlowOptions {
    double tol = 1e-11;
    double max_step = 0.02;       // core chart
    double max_step_cusp = 1.0;
    double record_ds = 0.0;       // minimum recorded spacing; 0 = every step
    double fixed_step = 0.0;      // core chart only; disables step control
    bool disable_cusp_chart = false;
    double stop_at_depth = std::numeric_limits<double>::infinity();
    // Stop once this many equator crossings have happened during a single
    // cusp visit (observing a winding tail). Negative = never.
    int stop_after_cusp_crossings = -1;
};

// Unit-speed geodesic of the reduced metric, arclength = length, switching
// to the leg chart inside the guard neighborhoods and back on the way out.
ReducedPath geodesic_flow(const GeodesicState& start, double length,
                          const FlowOptions& options = {});

// Launch from the constant-depth circle of a leg; outward = toward the core.
ReducedPath geodesic_flow_from_cusp(End end, double depth, double phi, bool outward,
                                    double length, const FlowOptions& options = {});

// Continue a flow from the last sample of an existing path.
ReducedPath continue_flow(const PathSample& from, double length,
                          const FlowOptions& options = {});

struct TailClass {
    enum Kind { Core, Straight, Winding } kind = Core;
    End end = End::B12;
    int first_symbol = 0;      // first tail arc label, Winding only
    double entry_sigma = 0.0;  // sigma where the terminal cusp block begins
    double max_depth = 0.0;    // deepest point reached in the block
    int crossings = 0;         // equator crossings inside the block
};

// Classifies the final (or initial) tail of a path: Straight if it reaches
// horizon_depth in a leg with no equator crossing after entry, Winding if the
// crossings after entry alternate the two adjacent arc labels.
TailClass classify_tail(const ReducedPath& path, double horizon_depth,
                        bool at_start = false);

// CSV export "sigma,u1,u2,u3,t1,t2,t3,chart,end,depth,phi".
void write_path_csv(std::ostream& out, const ReducedPath& path);
ReducedPath read_path_csv(std::istream& in);

}  // namespace p3b
