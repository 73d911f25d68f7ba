#include "p3b/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "p3b/errors.hpp"
#include "p3b/ode.hpp"
#include "p3b/syzygy.hpp"

namespace p3b {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = 1.7320508075688772;

struct EndFrame {
    Vec3 b, e1, e2;
};

// e1 points along the equator toward increasing azimuth, e2 toward the north
// pole, so u3 > 0 corresponds to phi in (0, pi).
EndFrame end_frame(End end) {
    Vec3 b = collision_point(end);
    Vec3 e1{-b.y, b.x, 0.0};
    Vec3 e2{0.0, 0.0, 1.0};
    return {b, e1, e2};
}

double sinc_inv(double x) {  // x / sin x, stable at 0
    if (std::abs(x) < 1e-8) return 1.0 + x * x / 6.0;
    return x / std::sin(x);
}

// ln tan(theta/4) from ell = ln theta, valid for arbitrarily small theta.
double log_tan_quarter(double ell) {
    double theta = std::exp(ell);
    if (theta < 1e-4) {
        double t2 = theta * theta;
        return ell - std::log(4.0) + t2 / 48.0;
    }
    return std::log(std::tan(theta / 4.0));
}

struct CuspCoeffs {
    double A, B, dA_dl, dB_dl, dA_dphi, dB_dphi;
};

// Reduced metric in leg coordinates (l = ln theta):
//   ds^2 = A dl^2 + B dphi^2,
// with A = lambda theta^2/4 and B = lambda sin^2(theta)/4 rearranged so that
// every term stays finite as theta -> 0 (both tend to 1/2).
CuspCoeffs cusp_coeffs(double theta, double phi) {
    double x = theta / 2.0;
    double s = std::sin(theta), c = std::cos(theta);
    double cx = std::cos(x);
    double cphi = std::cos(phi), sphi = std::sin(phi);

    double r = sinc_inv(x);
    double P1 = 2.0 * r * r;  // theta^2 / (2 sin^2(theta/2))

    double fp = 1.0 + c / 2.0 - (kSqrt3 / 2.0) * s * cphi;
    double fm = 1.0 + c / 2.0 + (kSqrt3 / 2.0) * s * cphi;
    double Tp = 1.0 / fp, Tm = 1.0 / fm;

    double th2 = theta * theta, th3 = th2 * theta;
    double Q = P1 + th2 * (Tp + Tm);

    double dfp_dt = -s / 2.0 - (kSqrt3 / 2.0) * c * cphi;
    double dfm_dt = -s / 2.0 + (kSqrt3 / 2.0) * c * cphi;
    double dfp_dphi = (kSqrt3 / 2.0) * s * sphi;
    double dfm_dphi = -(kSqrt3 / 2.0) * s * sphi;

    double s_over_theta = theta > 0 ? s / theta : 1.0;

    CuspCoeffs k;
    k.A = Q / 4.0;
    k.B = (2.0 * cx * cx + s * s * (Tp + Tm)) / 4.0;
    k.dA_dl = (-s_over_theta * P1 * P1 - th3 * (dfp_dt * Tp * Tp + dfm_dt * Tm * Tm) +
               2.0 * Q) / 4.0;
    k.dA_dphi = -th2 * (dfp_dphi * Tp * Tp + dfm_dphi * Tm * Tm) / 4.0;
    k.dB_dl = theta *
              (-s + 2.0 * s * c * (Tp + Tm) -
               s * s * (dfp_dt * Tp * Tp + dfm_dt * Tm * Tm)) / 4.0;
    k.dB_dphi = -s * s * (dfp_dphi * Tp * Tp + dfm_dphi * Tm * Tm) / 4.0;
    return k;
}

// lambda in leg coordinates.
double cusp_lambda(double theta, double phi) {
    double x = theta / 2.0;
    double sx = std::sin(x);
    double s = std::sin(theta), c = std::cos(theta);
    double cphi = std::cos(phi);
    double fp = 1.0 + c / 2.0 - (kSqrt3 / 2.0) * s * cphi;
    double fm = 1.0 + c / 2.0 + (kSqrt3 / 2.0) * s * cphi;
    return 1.0 / (2.0 * sx * sx) + 1.0 / fp + 1.0 / fm;
}

// 20-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    double node[20], weight[20];
    GaussRule() {
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            node[i] = x;
            weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussRule& gauss_rule() {
    static GaussRule rule;
    return rule;
}

// Integral over [a, b] of the depth-correction integrand
//   (sqrt(lambda) - sqrt(lambda_cusp)) / 2
// which is smooth and bounded on [0, theta0].
double depth_correction(double a, double b, double phi) {
    const GaussRule& g = gauss_rule();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 20; ++i) {
        double t = mid + half * g.node[i];
        double x = t / 2.0;
        double sx = std::sin(x);
        double lam_c = 1.0 / (2.0 * sx * sx);
        double diff = std::sqrt(cusp_lambda(t, phi)) - std::sqrt(lam_c);
        sum += g.weight[i] * 0.5 * diff;
    }
    return sum * half;
}

double depth_from_ell_impl(double ell, double phi) {
    double y0 = std::log(std::tan(kChartGuard / 4.0));
    double theta = std::exp(ell);
    double d = (y0 - log_tan_quarter(ell)) / std::sqrt(2.0);
    d += depth_correction(std::min(theta, kChartGuard), kChartGuard, phi);
    return d;
}

}  // namespace

double cusp_depth_from_ell(End, double ell, double phi) {
    return depth_from_ell_impl(ell, phi);
}

double cusp_depth_from_theta(End end, double theta, double phi) {
    if (theta <= 0) throw InvalidInput("theta must be positive");
    return cusp_depth_from_ell(end, std::log(theta), phi);
}

double cusp_theta_from_depth(End end, double depth, double phi) {
    // Newton in y = ln tan(theta/4).
    double y0 = std::log(std::tan(kChartGuard / 4.0));
    double y = y0 - std::sqrt(2.0) * depth;
    for (int it = 0; it < 60; ++it) {
        double theta = 4.0 * std::atan(std::exp(y));
        double f = cusp_depth_from_theta(end, theta, phi) - depth;
        double dtheta_dy = 4.0 * std::exp(y) / (1.0 + std::exp(2.0 * y));
        double df_dy = -(std::sqrt(cusp_lambda(theta, phi)) / 2.0) * dtheta_dy;
        double dy = f / df_dy;
        y -= dy;
        if (std::abs(dy) < 1e-14) break;
    }
    return 4.0 * std::atan(std::exp(y));
}

CuspMetric cusp_metric(End, double theta, double phi) {
    CuspCoeffs k = cusp_coeffs(theta, phi);
    return {k.A, k.B};
}

double cusp_cross_section_circumference(End end, double depth) {
    const int n = 64;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double phi = 2.0 * kPi * (i + 0.5) / n;
        double theta = cusp_theta_from_depth(end, depth, phi);
        sum += std::sqrt(cusp_metric(end, theta, phi).B) * (2.0 * kPi / n);
    }
    return sum;
}

CuspChart cusp_chart(const ShapePoint& point) {
    for (End end : {End::B12, End::B13, End::B23}) {
        EndFrame f = end_frame(end);
        double theta = angle_between(point.u, f.b);
        if (theta < kChartGuard) {
            double phi = std::atan2(dot(point.u, f.e2), dot(point.u, f.e1));
            return {end, cusp_depth_from_theta(end, theta, phi), phi};
        }
    }
    throw CuspGuardViolation("point is not inside any cusp-guard neighborhood");
}

ShapePoint cusp_chart_inverse(const CuspChart& chart) {
    EndFrame f = end_frame(chart.end);
    double theta = cusp_theta_from_depth(chart.end, chart.depth, chart.phi);
    Vec3 n = std::cos(chart.phi) * f.e1 + std::sin(chart.phi) * f.e2;
    return {std::cos(theta) * f.b + std::sin(theta) * n};
}

GeodesicState make_geodesic_state(const Vec3& u, const Vec3& direction) {
    Vec3 un = normalized(u);
    Vec3 w = reject(direction, un);
    double lam = conformal_lambda(un);
    w = w * (2.0 / (std::sqrt(lam) * norm(w)));
    return {un, w};
}

namespace {

// Internal flow state: either extrinsic (u, w) or leg coordinates.
struct CuspState {
    End end;
    double ell, phi, p_ell, p_phi;
};

CuspState to_cusp(const GeodesicState& s, End end) {
    EndFrame f = end_frame(end);
    double theta = angle_between(s.u, f.b);
    double c1 = dot(s.u, f.e1), c2 = dot(s.u, f.e2);
    double phi = std::atan2(c2, c1);
    Vec3 n = std::cos(phi) * f.e1 + std::sin(phi) * f.e2;
    Vec3 nprime = -std::sin(phi) * f.e1 + std::cos(phi) * f.e2;
    Vec3 du_dtheta = -std::sin(theta) * f.b + std::cos(theta) * n;
    double theta_dot = dot(s.w, du_dtheta);
    double phi_dot = dot(s.w, nprime) / std::sin(theta);
    CuspCoeffs k = cusp_coeffs(theta, phi);
    return {end, std::log(theta), phi, k.A * theta_dot / theta, k.B * phi_dot};
}

GeodesicState from_cusp(const CuspState& s) {
    EndFrame f = end_frame(s.end);
    double theta = std::exp(s.ell);
    Vec3 n = std::cos(s.phi) * f.e1 + std::sin(s.phi) * f.e2;
    Vec3 nprime = -std::sin(s.phi) * f.e1 + std::cos(s.phi) * f.e2;
    Vec3 u = std::cos(theta) * f.b + std::sin(theta) * n;
    CuspCoeffs kk = cusp_coeffs(theta, s.phi);
    double theta_dot = theta * s.p_ell / kk.A;
    double phi_dot = s.p_phi / kk.B;
    Vec3 du_dtheta = -std::sin(theta) * f.b + std::cos(theta) * n;
    Vec3 w = theta_dot * du_dtheta + phi_dot * std::sin(theta) * nprime;
    return {u, w};
}

struct FlowDriver {
    FlowOptions opt;
    ReducedPath path;
    double budget = 0.0;
    double last_recorded = -1.0;
    int crossings_this_visit = 0;
    bool done = false;

    bool duplicate(double sigma, Chart chart) const {
        return !path.samples.empty() && path.samples.back().sigma == sigma &&
               path.samples.back().chart == chart;
    }

    void record_core(double sigma, const GeodesicState& s, bool force) {
        if (!force && opt.record_ds > 0 && sigma - last_recorded < opt.record_ds) return;
        if (duplicate(sigma, Chart::Core)) return;
        PathSample ps;
        ps.sigma = sigma;
        ps.u = s.u;
        ps.w = s.w;
        ps.chart = Chart::Core;
        path.samples.push_back(ps);
        last_recorded = sigma;
    }

    void record_cusp(double sigma, const CuspState& s, bool force) {
        if (!force && opt.record_ds > 0 && sigma - last_recorded < opt.record_ds) return;
        if (duplicate(sigma, Chart::Cusp)) return;
        GeodesicState g = from_cusp(s);
        CuspCoeffs k = cusp_coeffs(std::exp(s.ell), s.phi);
        PathSample ps;
        ps.sigma = sigma;
        ps.u = g.u;
        ps.w = g.w;
        ps.chart = Chart::Cusp;
        ps.end = s.end;
        ps.depth = cusp_depth_from_ell(s.end, s.ell, s.phi);
        ps.phi = s.phi;
        ps.dell = s.p_ell / k.A;
        ps.dphi = s.p_phi / k.B;
        path.samples.push_back(ps);
        last_recorded = sigma;
    }

    // Runs the core chart from sigma0; returns the stop sigma. If an end was
    // entered, entered_end is set.
    double run_core(GeodesicState& s, double sigma0, bool& entered, End& entered_end) {
        entered = false;
        OdeState<6> y{s.u.x, s.u.y, s.u.z, s.w.x, s.w.y, s.w.z};
        double stop_sigma = sigma0;

        auto rhs = [](double, const OdeState<6>& y, OdeState<6>& d) {
            Vec3 u{y[0], y[1], y[2]}, w{y[3], y[4], y[5]};
            double lam = conformal_lambda(u);
            Vec3 G = reject(conformal_lambda_gradient(u), u) / lam;
            double w2 = dot(w, w);
            Vec3 wd = -w2 * u + 0.5 * w2 * G - dot(G, w) * w;
            d[0] = w.x; d[1] = w.y; d[2] = w.z;
            d[3] = wd.x; d[4] = wd.y; d[5] = wd.z;
        };

        auto observer = [&](double sigma, OdeState<6>& y, double) {
            Vec3 u = normalized(Vec3{y[0], y[1], y[2]});
            Vec3 w = reject(Vec3{y[3], y[4], y[5]}, u);
            w *= 2.0 / (std::sqrt(conformal_lambda(u)) * norm(w));
            y = {u.x, u.y, u.z, w.x, w.y, w.z};
            s = {u, w};
            stop_sigma = sigma;
            record_core(sigma, s, false);
            if (!opt.disable_cusp_chart) {
                for (End end : {End::B12, End::B13, End::B23}) {
                    if (angle_between(u, collision_point(end)) < kChartGuard) {
                        entered = true;
                        entered_end = end;
                        return StepControl::Stop;
                    }
                }
            }
            return StepControl::Continue;
        };

        integrate_ode<6>(rhs, sigma0, budget, y, opt.tol, opt.max_step, observer,
                         opt.fixed_step);
        s = {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
        if (!entered) {
            stop_sigma = budget;
            record_core(budget, s, true);
            done = true;
        }
        return stop_sigma;
    }

    // Runs the leg chart; returns the stop sigma. exited set if the geodesic
    // left through the hysteresis radius.
    double run_cusp(CuspState& s, double sigma0, bool& exited) {
        exited = false;
        crossings_this_visit = 0;
        OdeState<4> y{s.ell, s.phi, s.p_ell, s.p_phi};
        double stop_sigma = sigma0;
        double prev_phi = s.phi;
        const double ell_exit = std::log(kChartExit);

        auto rhs = [](double, const OdeState<4>& y, OdeState<4>& d) {
            CuspCoeffs k = cusp_coeffs(std::exp(y[0]), y[1]);
            double ld = y[2] / k.A, pd = y[3] / k.B;
            d[0] = ld;
            d[1] = pd;
            d[2] = 0.5 * (k.dA_dl * ld * ld + k.dB_dl * pd * pd);
            d[3] = 0.5 * (k.dA_dphi * ld * ld + k.dB_dphi * pd * pd);
        };

        auto observer = [&](double sigma, OdeState<4>& y, double) {
            CuspCoeffs k = cusp_coeffs(std::exp(y[0]), y[1]);
            double n2 = y[2] * y[2] / k.A + y[3] * y[3] / k.B;
            double scale = 1.0 / std::sqrt(n2);
            y[2] *= scale;
            y[3] *= scale;
            s = {s.end, y[0], y[1], y[2], y[3]};
            stop_sigma = sigma;
            record_cusp(sigma, s, false);

            long k0 = (long)std::floor(prev_phi / kPi);
            long k1 = (long)std::floor(y[1] / kPi);
            if (k1 != k0) crossings_this_visit += (int)std::labs(k1 - k0);
            prev_phi = y[1];

            if (y[0] >= ell_exit) {
                exited = true;
                return StepControl::Stop;
            }
            if (opt.stop_after_cusp_crossings >= 0 &&
                crossings_this_visit >= opt.stop_after_cusp_crossings)
                return StepControl::Stop;
            if (std::isfinite(opt.stop_at_depth) &&
                cusp_depth_from_ell(s.end, y[0], y[1]) >= opt.stop_at_depth)
                return StepControl::Stop;
            return StepControl::Continue;
        };

        OdeStats stats = integrate_ode<4>(rhs, sigma0, budget, y, opt.tol,
                                          opt.max_step_cusp, observer);
        s = {s.end, y[0], y[1], y[2], y[3]};
        if (!exited) {
            done = true;
            if (!stats.stopped_by_callback) {
                stop_sigma = budget;
                record_cusp(budget, s, true);
            } else {
                record_cusp(stop_sigma, s, true);
            }
        }
        return stop_sigma;
    }

    void run(GeodesicState core_state, bool start_in_core, CuspState cusp_state,
             double length) {
        budget = length;
        double sigma = 0.0;
        bool in_core = start_in_core;
        if (in_core)
            record_core(0.0, core_state, true);
        else
            record_cusp(0.0, cusp_state, true);

        while (!done && sigma < budget) {
            if (in_core) {
                bool entered = false;
                End end = End::B12;
                sigma = run_core(core_state, sigma, entered, end);
                if (entered) {
                    cusp_state = to_cusp(core_state, end);
                    record_cusp(sigma, cusp_state, true);
                    in_core = false;
                }
            } else {
                bool exited = false;
                sigma = run_cusp(cusp_state, sigma, exited);
                if (exited) {
                    core_state = from_cusp(cusp_state);
                    record_core(sigma, core_state, true);
                    in_core = true;
                }
            }
        }
    }
};

}  // namespace

ReducedPath geodesic_flow(const GeodesicState& start, double length,
                          const FlowOptions& options) {
    FlowDriver driver;
    driver.opt = options;
    driver.run(start, true, CuspState{}, length);
    return std::move(driver.path);
}

ReducedPath geodesic_flow_from_cusp(End end, double depth, double phi, bool outward,
                                    double length, const FlowOptions& options) {
    FlowDriver driver;
    driver.opt = options;
    double theta = cusp_theta_from_depth(end, depth, phi);
    CuspCoeffs k = cusp_coeffs(theta, phi);
    CuspState s{end, std::log(theta), phi, (outward ? 1.0 : -1.0) * std::sqrt(k.A), 0.0};
    driver.run(GeodesicState{}, false, s, length);
    return std::move(driver.path);
}

ReducedPath continue_flow(const PathSample& from, double length,
                          const FlowOptions& options) {
    FlowDriver driver;
    driver.opt = options;
    if (from.chart == Chart::Core) {
        driver.run(GeodesicState{from.u, from.w}, true, CuspState{}, length);
    } else {
        double theta = cusp_theta_from_depth(from.end, from.depth, from.phi);
        CuspCoeffs k = cusp_coeffs(theta, from.phi);
        CuspState s{from.end, std::log(theta), from.phi, k.A * from.dell,
                    k.B * from.dphi};
        driver.run(GeodesicState{}, false, s, length);
    }
    ReducedPath path = std::move(driver.path);
    for (auto& ps : path.samples) ps.sigma += from.sigma;
    return path;
}

TailClass classify_tail(const ReducedPath& path, double horizon_depth, bool at_start) {
    if (path.samples.empty()) return {};
    // Terminal contiguous leg block.
    auto block_of = [&](bool start) -> std::pair<std::size_t, std::size_t> {
        const auto& s = path.samples;
        if (start) {
            if (s.front().chart != Chart::Cusp) return {0, 0};
            End end = s.front().end;
            std::size_t i = 0;
            while (i < s.size() && s[i].chart == Chart::Cusp && s[i].end == end) ++i;
            return {0, i};
        }
        if (s.back().chart != Chart::Cusp) return {0, 0};
        End end = s.back().end;
        std::size_t i = s.size();
        while (i > 0 && s[i - 1].chart == Chart::Cusp && s[i - 1].end == end) --i;
        return {i, s.size()};
    };

    auto [lo, hi] = block_of(at_start);
    if (lo == hi) return {};
    double max_depth = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
        max_depth = std::max(max_depth, path.samples[i].depth);

    End end = path.samples[lo].end;
    double sigma_lo = path.samples[lo].sigma, sigma_hi = path.samples[hi - 1].sigma;

    TailClass out;
    out.end = end;
    out.entry_sigma = at_start ? sigma_hi : sigma_lo;
    out.max_depth = max_depth;
    if (max_depth < horizon_depth) return out;

    auto crossings = detect_crossings(path);
    std::vector<int> labels;
    for (const auto& c : crossings)
        if (c.sigma >= sigma_lo - 1e-12 && c.sigma <= sigma_hi + 1e-12)
            labels.push_back(c.arc);
    out.crossings = (int)labels.size();

    if (labels.empty()) {
        out.kind = TailClass::Straight;
        return out;
    }
    // "first" symbol = nearest the entry from the core side
    if (at_start) std::reverse(labels.begin(), labels.end());
    auto [a, b] = arcs_adjacent_to(end);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != a && labels[i] != b) return out;
        if (i > 0 && labels[i] == labels[i - 1]) return out;
    }
    out.kind = TailClass::Winding;
    out.first_symbol = labels.front();
    return out;
}

void write_path_csv(std::ostream& out, const ReducedPath& path) {
    out << "sigma,u1,u2,u3,t1,t2,t3,chart,end,depth,phi\n";
    out.precision(17);
    for (const auto& s : path.samples) {
        out << s.sigma << ',' << s.u.x << ',' << s.u.y << ',' << s.u.z << ',' << s.w.x
            << ',' << s.w.y << ',' << s.w.z << ','
            << (s.chart == Chart::Core ? "core" : "cusp") << ','
            << (s.chart == Chart::Core ? "-" : end_name(s.end)) << ',' << s.depth << ','
            << s.phi << '\n';
    }
}

ReducedPath read_path_csv(std::istream& in) {
    ReducedPath path;
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty path CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        PathSample s;
        std::string field;
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw InvalidInput("short path CSV row");
            return field;
        };
        s.sigma = std::stod(next());
        s.u.x = std::stod(next());
        s.u.y = std::stod(next());
        s.u.z = std::stod(next());
        s.w.x = std::stod(next());
        s.w.y = std::stod(next());
        s.w.z = std::stod(next());
        std::string chart = next();
        std::string end = next();
        s.chart = chart == "cusp" ? Chart::Cusp : Chart::Core;
        if (s.chart == Chart::Cusp) s.end = end_from_name(end);
        s.depth = std::stod(next());
        s.phi = std::stod(next());
        path.samples.push_back(s);
    }
    return path;
}

}  // namespace p3b
