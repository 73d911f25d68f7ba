#include "p3b/lift.hpp"

#include <algorithm>
#include <cmath>

#include "p3b/errors.hpp"
#include "p3b/ode.hpp"
#include "p3b/shape.hpp"

namespace p3b {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double min_end_angle(const Vec3& u) {
    double best = 1e300;
    for (End end : {End::B12, End::B13, End::B23})
        best = std::min(best, angle_between(u, collision_point(end)));
    return best;
}

Vec3 hopf(const cplx& z1, const cplx& z2) {
    cplx w = z1 * std::conj(z2);
    return {std::norm(z1) - std::norm(z2), 2.0 * w.real(), 2.0 * w.imag()};
}

PlanarConfig config_from_z(const cplx& z1, const cplx& z2) {
    cplx a = z1 / std::sqrt(2.0), b = z2 / std::sqrt(6.0);
    return {{a + b, -a + b, -2.0 * b}};
}

// dz of the horizontal transport: z' = (1/2) sum_k w_k M_k z with
// M1 = diag(1,-1), M2 = sigma_x, M3 = -sigma_y; then Hopf(z)' = w and
// z' is Euclidean-orthogonal to both z and iz (the M_k are Hermitian and
// <z, M_k z> = u_k is real, so <z', z> = (w . u)/2 = 0 by tangency).
void z_dot(const Vec3& w, const cplx& z1, const cplx& z2, cplx& d1, cplx& d2) {
    const cplx i(0.0, 1.0);
    d1 = 0.5 * (w.x * z1 + w.y * z2 + i * w.z * z2);
    d2 = 0.5 * (-w.x * z2 + w.y * z1 - i * w.z * z1);
}

// Fornberg weights for the m-th derivative at x0 from nodes x[0..n-1].
void fornberg_weights(double x0, const double* x, int n, int m, double* c) {
    // c has n entries on exit; standard recurrence (Fornberg 1988)
    std::vector<double> C(n * (m + 1), 0.0);
    auto at = [&](int j, int k) -> double& { return C[j * (m + 1) + k]; };
    double c1 = 1.0;
    double c4 = x[0] - x0;
    at(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
                at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
            at(j, 0) = c4 * at(j, 0) / c3;
        }
        c1 = c2;
    }
    for (int j = 0; j < n; ++j) c[j] = at(j, m);
}

std::pair<int, int> collision_pair(End end) {
    switch (end) {
        case End::B12: return {0, 1};
        case End::B13: return {0, 2};
        case End::B23: return {1, 2};
    }
    return {0, 1};
}

}  // namespace

LiftedOrbit horizontal_lift(const ReducedPath& path, double tol) {
    const auto& samples = path.samples;
    if (samples.empty()) throw InvalidInput("cannot lift an empty path");

    std::size_t i0 = 0, i1 = samples.size();
    while (i0 < samples.size() && min_end_angle(samples[i0].u) < kMetricCuspGuard) ++i0;
    while (i1 > i0 && min_end_angle(samples[i1 - 1].u) < kMetricCuspGuard) --i1;
    if (i0 >= i1) throw InvalidInput("path lies entirely inside the metric cusp guard");

    LiftedOrbit lift;
    lift.source = path;
    lift.truncated_start = i0 > 0;
    lift.truncated_finish = i1 < samples.size();
    if (samples.front().chart == Chart::Cusp) lift.start_end = samples.front().end;
    if (samples.back().chart == Chart::Cusp) lift.finish_end = samples.back().end;

    // initial fiber point over u0 via the Hopf section
    Vec3 u0 = normalized(samples[i0].u);
    auto [z1, z2] = jacobi_coords(representative(ShapePoint{u0}));
    Vec3 w0 = reject(samples[i0].w, u0);
    w0 *= 2.0 / (std::sqrt(conformal_lambda(u0)) * norm(w0));

    OdeState<8> y{z1.real(), z1.imag(), z2.real(), z2.imag(), w0.x, w0.y, w0.z, 0.0};

    auto rhs = [](double, const OdeState<8>& y, OdeState<8>& d) {
        cplx z1(y[0], y[1]), z2(y[2], y[3]);
        Vec3 w{y[4], y[5], y[6]};
        Vec3 u = hopf(z1, z2);
        double lam = conformal_lambda(u);
        Vec3 G = reject(conformal_lambda_gradient(u), u) / lam;
        double w2 = dot(w, w);
        Vec3 wd = -w2 * u + 0.5 * w2 * G - dot(G, w) * w;
        cplx d1, d2;
        z_dot(w, z1, z2, d1, d2);
        d[0] = d1.real();
        d[1] = d1.imag();
        d[2] = d2.real();
        d[3] = d2.imag();
        d[4] = wd.x;
        d[5] = wd.y;
        d[6] = wd.z;
        d[7] = 1.0 / (kSqrt2 * lam);
    };

    auto record = [&](double sigma, const OdeState<8>& y) {
        cplx z1(y[0], y[1]), z2(y[2], y[3]);
        Vec3 w{y[4], y[5], y[6]};
        PlanarConfig config = config_from_z(z1, z2);
        cplx d1, d2;
        z_dot(w, z1, z2, d1, d2);
        PlanarConfig qp = config_from_z(d1, d2);  // dq/dsigma, linear in z
        double qpn = 0.0;
        for (int j = 0; j < 3; ++j) qpn += std::norm(qp.q[j]);
        qpn = std::sqrt(qpn);
        double U = potential(config);
        PlanarState state;
        state.config = config;
        double scale = std::sqrt(2.0 * U) / qpn;
        for (int j = 0; j < 3; ++j) state.v[j] = scale * qp.q[j];
        lift.points.push_back({sigma, y[7], state});
    };

    auto observer = [&](double sigma, OdeState<8>& y, double) {
        double zn = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
        for (int k = 0; k < 4; ++k) y[k] /= zn;
        cplx z1(y[0], y[1]), z2(y[2], y[3]);
        Vec3 u = hopf(z1, z2);
        Vec3 w = reject(Vec3{y[4], y[5], y[6]}, u);
        w *= 2.0 / (std::sqrt(conformal_lambda(u)) * norm(w));
        y[4] = w.x;
        y[5] = w.y;
        y[6] = w.z;
        record(sigma, y);
        if (min_end_angle(u) < kMetricCuspGuard) {
            lift.truncated_finish = true;
            return StepControl::Stop;
        }
        return StepControl::Continue;
    };

    record(samples[i0].sigma, y);
    integrate_ode<8>(rhs, samples[i0].sigma, samples[i1 - 1].sigma, y, tol, 0.02,
                     observer);

    lift.trajectory.tol = tol;
    for (const auto& p : lift.points) lift.trajectory.samples.push_back({p.t, p.state});
    return lift;
}

ResidualReport verify_solution(const LiftedOrbit& lifted, double tol) {
    const auto& pts = lifted.points;
    if (pts.size() < 10) throw InvalidInput("verify_solution needs at least 10 samples");
    ResidualReport rep;

    for (const auto& p : pts) {
        auto inv = conserved_quantities(p.state);
        rep.max_abs_E = std::max(rep.max_abs_E, std::abs(inv.E));
        rep.max_abs_C = std::max(rep.max_abs_C, std::abs(inv.C));
        rep.max_abs_I_err = std::max(rep.max_abs_I_err, std::abs(inv.I - 1.0));
        double U = potential(p.state.config);
        double hor = std::max(std::abs(inv.Idot / 2.0), std::abs(inv.C)) / (kSqrt2 * U);
        rep.max_horizontality = std::max(rep.max_horizontality, hor);
    }

    // Eq. 1 residual by 5-point Fornberg second derivative in physical time,
    // where the stencil is wide enough to be numerically conditioned.
    int n = (int)pts.size();
    for (int i = 2; i + 2 < n; ++i) {
        double x[5], c[5];
        for (int j = 0; j < 5; ++j) x[j] = pts[i - 2 + j].t;
        if (x[4] - x[0] < 5e-4) continue;
        fornberg_weights(pts[i].t, x, 5, 2, c);
        std::array<cplx, 3> qdd{};
        for (int j = 0; j < 5; ++j)
            for (int b = 0; b < 3; ++b) qdd[b] += c[j] * pts[i - 2 + j].state.config.q[b];
        auto acc = acceleration(pts[i].state.config);
        double num = 0.0, den = 0.0;
        for (int b = 0; b < 3; ++b) {
            num += std::norm(qdd[b] - acc[b]);
            den += std::norm(acc[b]);
        }
        double rel = std::sqrt(num / den);
        ++rep.eq1_samples_checked;
        if (rel > rep.eq1_residual) {
            rep.eq1_residual = rel;
            rep.eq1_worst_sample = i;
        }
    }

    bool tail_ok = true;
    if (lifted.finish_end) {
        auto [a, b] = collision_pair(*lifted.finish_end);
        auto pair_r = [&](int i) {
            return std::abs(pts[i].state.config.q[a] - pts[i].state.config.q[b]);
        };
        // monotone decrease from the last sample with separation >= 0.05
        int start = n - 1;
        for (int i = n - 1; i >= 0; --i)
            if (pair_r(i) >= 0.05) {
                start = i;
                break;
            }
        rep.pair_distance_monotone = true;
        for (int i = start; i + 1 < n; ++i)
            if (pair_r(i + 1) >= pair_r(i) + 1e-14) rep.pair_distance_monotone = false;
        rep.final_pair_distance = pair_r(n - 1);

        // collision time by extrapolating t at geometrically shrinking
        // angular distances from the finish end
        Vec3 bvec = collision_point(*lifted.finish_end);
        std::vector<double> t_at;
        double level = 0.04;
        int j = n - 1;
        // walk backwards: angles increase away from the end
        std::vector<double> ang(n);
        for (int i = 0; i < n; ++i)
            ang[i] = angle_between(shape_map(pts[i].state.config).u, bvec);
        for (int lev = 0; lev < 6; ++lev, level *= 0.5) {
            // last downward crossing of this level
            double tc = -1.0;
            for (int i = n - 1; i > 0; --i) {
                if (ang[i] <= level && ang[i - 1] > level) {
                    double f = (level - ang[i - 1]) / (ang[i] - ang[i - 1]);
                    tc = pts[i - 1].t + f * (pts[i].t - pts[i - 1].t);
                    break;
                }
            }
            if (tc < 0) break;
            t_at.push_back(tc);
        }
        (void)j;
        if (t_at.size() >= 4) {
            rep.t_collision_converged = true;
            double prev = t_at[1] - t_at[0];
            double last = prev;
            for (std::size_t k = 2; k < t_at.size(); ++k) {
                double inc = t_at[k] - t_at[k - 1];
                if (!(inc < 0.6 * prev)) rep.t_collision_converged = false;
                prev = inc;
                last = inc;
            }
            double r = 0.25;  // theta^2 scaling of the remaining time
            rep.t_collision = t_at.back() + last * r / (1.0 - r);
        }
        tail_ok = rep.pair_distance_monotone && rep.t_collision_converged &&
                  rep.final_pair_distance < 1e-3;
    } else {
        rep.pair_distance_monotone = true;
    }

    rep.passed = rep.eq1_residual <= tol && rep.max_abs_E <= 1e-8 &&
                 rep.max_abs_C <= 1e-10 && rep.max_abs_I_err <= 1e-8 && tail_ok;
    return rep;
}

}  // namespace p3b
