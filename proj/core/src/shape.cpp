#include "p3b/shape.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace p3b {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kPi = std::numbers::pi;

double wrap_azimuth(double a) {
    while (a <= -kPi) a += 2 * kPi;
    while (a > kPi) a -= 2 * kPi;
    return a;
}
}  // namespace

Vec3 collision_point(End end) {
    switch (end) {
        case End::B12: return {-1.0, 0.0, 0.0};
        case End::B13: return {0.5, -kSqrt3 / 2, 0.0};
        case End::B23: return {0.5, kSqrt3 / 2, 0.0};
    }
    return {};
}

const char* end_name(End end) {
    switch (end) {
        case End::B12: return "B12";
        case End::B13: return "B13";
        case End::B23: return "B23";
    }
    return "?";
}

End end_from_name(const std::string& name) {
    if (name == "B12") return End::B12;
    if (name == "B13") return End::B13;
    if (name == "B23") return End::B23;
    throw InvalidInput("unknown end label: " + name);
}

int arc_at_azimuth(double azimuth) {
    double a = wrap_azimuth(azimuth);
    // B13 at -60 deg, B23 at +60 deg, B12 at 180 deg.
    if (a > -kPi / 3 && a < kPi / 3) return 3;
    if (a > kPi / 3 && a < kPi) return 2;
    return 1;
}

std::pair<int, int> arcs_adjacent_to(End end) {
    switch (end) {
        case End::B12: return {1, 2};
        case End::B13: return {1, 3};
        case End::B23: return {2, 3};
    }
    return {};
}

std::pair<End, End> arc_endpoints(int arc) {
    switch (arc) {
        case 1: return {End::B12, End::B13};
        case 2: return {End::B12, End::B23};
        case 3: return {End::B13, End::B23};
    }
    throw InvalidInput("arc label must be 1, 2 or 3");
}

End end_opposite_arc(int arc) {
    switch (arc) {
        case 1: return End::B23;
        case 2: return End::B13;
        case 3: return End::B12;
    }
    throw InvalidInput("arc label must be 1, 2 or 3");
}

std::pair<cplx, cplx> jacobi_coords(const PlanarConfig& config) {
    if (!config.is_centered()) throw NotCentered("jacobi_coords requires a centered configuration");
    cplx z1 = (config.q[0] - config.q[1]) / std::sqrt(2.0);
    cplx z2 = (config.q[0] + config.q[1] - 2.0 * config.q[2]) / std::sqrt(6.0);
    return {z1, z2};
}

ShapePoint shape_map(const PlanarConfig& config, double guard) {
    if (config.min_pair_distance() < guard)
        throw DegenerateConfiguration("shape_map at a collision");
    auto [z1, z2] = jacobi_coords(config);
    double inertia = std::norm(z1) + std::norm(z2);
    cplx w = z1 * std::conj(z2);
    Vec3 u{(std::norm(z1) - std::norm(z2)) / inertia, 2.0 * w.real() / inertia,
           2.0 * w.imag() / inertia};
    return {normalized(u)};
}

PlanarConfig representative(const ShapePoint& point) {
    const Vec3& u = point.u;
    cplx z1, z2;
    if (u.x > -0.5) {
        double r1 = std::sqrt((1.0 + u.x) / 2.0);
        z1 = r1;
        z2 = cplx(u.y, -u.z) / (2.0 * r1);
    } else {
        double r2 = std::sqrt((1.0 - u.x) / 2.0);
        z2 = r2;
        z1 = cplx(u.y, u.z) / (2.0 * r2);
    }
    // Invert the Jacobi map.
    cplx a = z1 / std::sqrt(2.0), b = z2 / std::sqrt(6.0);
    PlanarConfig c{{a + b, -a + b, -2.0 * b}};
    return c;
}

double conformal_lambda(const Vec3& u) {
    double out = 0.0;
    for (End end : {End::B12, End::B13, End::B23})
        out += 1.0 / (1.0 - dot(u, collision_point(end)));
    return out;
}

Vec3 conformal_lambda_gradient(const Vec3& u) {
    Vec3 g{};
    for (End end : {End::B12, End::B13, End::B23}) {
        Vec3 b = collision_point(end);
        double f = 1.0 - dot(u, b);
        g += b / (f * f);
    }
    return g;
}

MetricData conformal_factor(const ShapePoint& point, double cusp_guard) {
    const Vec3& u = point.u;
    for (End end : {End::B12, End::B13, End::B23}) {
        if (angle_between(u, collision_point(end)) < cusp_guard)
            throw CuspGuardViolation("metric data requested inside the cusp guard; use the cusp chart");
    }
    MetricData data{};
    data.lambda = conformal_lambda(u);

    Vec3 grad = reject(conformal_lambda_gradient(u), u);
    data.grad_log_lambda = grad / data.lambda;

    // Lap(1/(1-l)) = 2/(1-l)^2 for l = <u,b> with |b| = 1 on the unit sphere.
    double lap_lambda = 0.0;
    for (End end : {End::B12, End::B13, End::B23}) {
        double f = 1.0 - dot(u, collision_point(end));
        lap_lambda += 2.0 / (f * f);
    }
    data.lap_log_lambda = lap_lambda / data.lambda - dot(grad, grad) / (data.lambda * data.lambda);

    // Local orthonormal frame, seeded by whichever axis is least aligned.
    Vec3 seed = std::abs(u.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    data.frame_e1 = normalized(reject(seed, u));
    data.frame_e2 = cross(u, data.frame_e1);
    data.grad2[0] = dot(data.grad_log_lambda, data.frame_e1);
    data.grad2[1] = dot(data.grad_log_lambda, data.frame_e2);
    return data;
}

double gaussian_curvature(const MetricData& data) {
    return (4.0 - 2.0 * data.lap_log_lambda) / data.lambda;
}

double gaussian_curvature(const ShapePoint& point, double cusp_guard) {
    return gaussian_curvature(conformal_factor(point, cusp_guard));
}

double submersion_check(const PlanarConfig& config, const std::array<cplx, 3>& w) {
    if (!config.is_centered()) throw NotCentered("submersion_check requires a centered configuration");
    cplx wsum = w[0] + w[1] + w[2];
    double qnorm = 0.0, wnorm = 0.0;
    cplx qw = 0.0;  // sum conj(q_j) w_j; real part = <w,q>, imag part = <w,iq>
    for (int j = 0; j < 3; ++j) {
        qnorm += std::norm(config.q[j]);
        wnorm += std::norm(w[j]);
        qw += std::conj(config.q[j]) * w[j];
    }
    double scale = std::sqrt(qnorm * wnorm);
    if (std::abs(wsum) > 1e-10 * std::sqrt(wnorm) || std::abs(qw) > 1e-10 * scale)
        throw InvalidInput("vector is not horizontal");

    // Pushforward by 4th-order central differences along q + t w.
    double h = 1e-4 * std::sqrt(qnorm / wnorm);
    auto at = [&](double t) {
        PlanarConfig c = config;
        for (int j = 0; j < 3; ++j) c.q[j] += t * w[j];
        return shape_map(c).u;
    };
    Vec3 du = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);

    Vec3 u = shape_map(config).u;
    double upstairs = potential(config) * wnorm;
    double reduced = conformal_lambda(u) * 0.25 * dot(du, du);
    return std::abs(upstairs - reduced) / std::max(upstairs, reduced);
}

void write_curvature_csv(std::ostream& out, int n_theta, int n_phi, double cusp_guard) {
    out << "theta,phi,lambda,K\n";
    out.precision(17);
    for (int i = 0; i < n_theta; ++i) {
        double theta = kPi * (i + 0.5) / n_theta;
        for (int j = 0; j < n_phi; ++j) {
            double phi = 2 * kPi * j / n_phi;
            Vec3 u{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                   std::cos(theta)};
            bool guarded = false;
            for (End end : {End::B12, End::B13, End::B23})
                if (angle_between(u, collision_point(end)) < cusp_guard) guarded = true;
            if (guarded) continue;
            MetricData d = conformal_factor({u}, cusp_guard);
            out << theta << ',' << phi << ',' << d.lambda << ',' << gaussian_curvature(d)
                << '\n';
        }
    }
}

}  // namespace p3b
