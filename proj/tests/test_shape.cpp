#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "p3b/shape.hpp"

using namespace p3b;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 sphere_point(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta)};
}

PlanarConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (;;) {
        PlanarConfig c{{cplx(unit(rng), unit(rng)), cplx(unit(rng), unit(rng)),
                        cplx(unit(rng), unit(rng))}};
        c = c.centered();
        if (c.min_pair_distance() >= 0.3) return c;
    }
}

}  // namespace

TEST_CASE("collision points sit on the equator 120 degrees apart") {
    Vec3 b12 = collision_point(End::B12);
    Vec3 b13 = collision_point(End::B13);
    Vec3 b23 = collision_point(End::B23);
    for (const Vec3& b : {b12, b13, b23}) {
        CHECK(norm(b) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(b.z == 0.0);
    }
    CHECK(std::atan2(b12.y, b12.x) == doctest::Approx(kPi));
    CHECK(std::atan2(b23.y, b23.x) == doctest::Approx(kPi / 3));
    CHECK(std::atan2(b13.y, b13.x) == doctest::Approx(-kPi / 3));
    CHECK(angle_between(b12, b13) == doctest::Approx(2 * kPi / 3).epsilon(1e-14));
}

TEST_CASE("arc labels and adjacency") {
    CHECK(arc_at_azimuth(0.0) == 3);
    CHECK(arc_at_azimuth(kPi / 2) == 2);
    CHECK(arc_at_azimuth(-kPi / 2) == 1);
    CHECK(arcs_adjacent_to(End::B12) == std::pair<int, int>(1, 2));
    CHECK(arcs_adjacent_to(End::B13) == std::pair<int, int>(1, 3));
    CHECK(arcs_adjacent_to(End::B23) == std::pair<int, int>(2, 3));
    CHECK(arc_endpoints(3) == std::pair<End, End>(End::B13, End::B23));
    CHECK(end_opposite_arc(1) == End::B23);
    CHECK(end_opposite_arc(2) == End::B13);
    CHECK(end_opposite_arc(3) == End::B12);
    for (End e : {End::B12, End::B13, End::B23})
        CHECK(end_from_name(end_name(e)) == e);
}

TEST_CASE("binary collision shapes map to their labeled points") {
    // q1 = q2 (slightly separated to stay outside the guard)
    PlanarConfig c12{{cplx(1e-4, 0), cplx(-1e-4, 0), cplx(0, 1)}};
    Vec3 u = shape_map(c12.centered()).u;
    CHECK(angle_between(u, collision_point(End::B12)) < 1e-3);
    PlanarConfig c23{{cplx(0, 1), cplx(1e-4, 0), cplx(-1e-4, 0)}};
    u = shape_map(c23.centered()).u;
    CHECK(angle_between(u, collision_point(End::B23)) < 1e-3);
}

TEST_CASE("equilateral triangles map to the poles") {
    PlanarConfig c;
    for (int j = 0; j < 3; ++j) c.q[j] = std::polar(1.0, 2.0 * kPi * j / 3.0);
    Vec3 u = shape_map(c).u;
    CHECK(std::abs(std::abs(u.z) - 1.0) < 1e-14);
    // swapping two bodies flips the orientation, hence the hemisphere
    std::swap(c.q[0], c.q[1]);
    CHECK(shape_map(c).u.z == doctest::Approx(-u.z).epsilon(1e-14));
}

TEST_CASE("shape map is invariant under rotation and scaling") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
        PlanarConfig c = random_config(rng);
        Vec3 u0 = shape_map(c).u;
        cplx g = std::polar(2.7, 1.3);  // rotation by 1.3, scale by 2.7
        PlanarConfig gc = c;
        for (auto& q : gc.q) q *= g;
        CHECK(angle_between(u0, shape_map(gc).u) <= 1e-10);
    }
}

TEST_CASE("representative inverts the shape map with I = 1") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> th(0.1, kPi - 0.1), ph(-kPi, kPi);
    for (int k = 0; k < 20; ++k) {
        Vec3 u = sphere_point(th(rng), ph(rng));
        bool near_end = false;
        for (End e : {End::B12, End::B13, End::B23})
            if (angle_between(u, collision_point(e)) < 0.05) near_end = true;
        if (near_end) continue;
        PlanarConfig c = representative(ShapePoint{u});
        CHECK(c.is_centered(1e-12));
        double I = 0;
        for (const auto& q : c.q) I += std::norm(q);
        CHECK(I == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(angle_between(shape_map(c).u, u) <= 1e-12);
    }
}

TEST_CASE("conformal factor: closed form matches I*U and the pole value 3") {
    CHECK(conformal_lambda({0, 0, 1}) == doctest::Approx(3.0).epsilon(1e-14));
    std::mt19937_64 rng(17);
    for (int k = 0; k < 10; ++k) {
        PlanarConfig c = random_config(rng);
        double I = 0;
        for (const auto& q : c.q) I += std::norm(q);
        double lam = conformal_lambda(shape_map(c).u);
        CHECK(lam == doctest::Approx(I * potential(c)).epsilon(1e-12));
    }
}

TEST_CASE("conformal gradient matches a central difference") {
    Vec3 u = normalized(Vec3{0.3, -0.5, 0.7});
    Vec3 g = conformal_lambda_gradient(u);
    double h = 1e-6;
    for (Vec3 dir : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}) {
        double fd =
            (conformal_lambda(u + h * dir) - conformal_lambda(u - h * dir)) / (2 * h);
        CHECK(fd == doctest::Approx(dot(g, dir)).epsilon(1e-5));
    }
}

TEST_CASE("curvature vanishes at the poles and is negative in between") {
    CHECK(std::abs(gaussian_curvature(ShapePoint{{0, 0, 1}})) < 1e-12);
    CHECK(std::abs(gaussian_curvature(ShapePoint{{0, 0, -1}})) < 1e-12);
    // midpoint of collinear arc 3 (azimuth 0): Euler shape, K = -20/27
    double K = gaussian_curvature(ShapePoint{{1, 0, 0}});
    CHECK(K == doctest::Approx(-20.0 / 27.0).epsilon(1e-10));
    CHECK(gaussian_curvature(ShapePoint{sphere_point(1.0, 2.0)}) < 0.0);
}

TEST_CASE("Laplacian term agrees with a finite-difference Laplace-Beltrami") {
    // compare lap_log_lambda with a 5-point stencil in (theta, phi)
    double th = 1.1, ph = 0.7, h = 1e-4;
    auto f = [](double t, double p) {
        return std::log(conformal_lambda(sphere_point(t, p)));
    };
    double ftt = (f(th + h, ph) - 2 * f(th, ph) + f(th - h, ph)) / (h * h);
    double ft = (f(th + h, ph) - f(th - h, ph)) / (2 * h);
    double fpp = (f(th, ph + h) - 2 * f(th, ph) + f(th, ph - h)) / (h * h);
    double lap_fd = ftt + ft / std::tan(th) + fpp / (std::sin(th) * std::sin(th));
    MetricData d = conformal_factor(ShapePoint{sphere_point(th, ph)});
    CHECK(d.lap_log_lambda == doctest::Approx(lap_fd).epsilon(1e-5));
}

TEST_CASE("metric data respects the cusp guard") {
    Vec3 near = normalized(collision_point(End::B12) + Vec3{0, 1e-4, 0});
    CHECK_THROWS_AS(conformal_factor(ShapePoint{near}), CuspGuardViolation);
}

TEST_CASE("submersion identity holds for horizontal vectors") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        PlanarConfig c = random_config(rng);
        std::array<cplx, 3> w{cplx(unit(rng), unit(rng)), cplx(unit(rng), unit(rng)),
                              cplx(unit(rng), unit(rng))};
        cplx wsum = (w[0] + w[1] + w[2]) / 3.0;
        for (auto& x : w) x -= wsum;
        cplx qw = 0;
        double qn = 0;
        for (int j = 0; j < 3; ++j) {
            qw += std::conj(c.q[j]) * w[j];
            qn += std::norm(c.q[j]);
        }
        for (int j = 0; j < 3; ++j) w[j] -= qw / qn * c.q[j];
        CHECK(submersion_check(c, w) <= 1e-8);
    }
    // a vector with a rotation component is rejected
    PlanarConfig c = random_config(rng);
    std::array<cplx, 3> w;
    for (int j = 0; j < 3; ++j) w[j] = cplx(0, 1) * c.q[j];
    CHECK_THROWS_AS(submersion_check(c, w), InvalidInput);
}
