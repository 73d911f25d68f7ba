// Acceptance suite: one pass/fail line per criterion, exit code = #failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "p3b/dynamics.hpp"
#include "p3b/lift.hpp"
#include "p3b/orbit.hpp"
#include "p3b/shape.hpp"
#include "p3b/syzygy.hpp"

using namespace p3b;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

void line(int criterion, const char* title, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
                title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PlanarState random_bounded_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (;;) {
        PlanarState s;
        for (int j = 0; j < 3; ++j) {
            s.config.q[j] = {unit(rng), unit(rng)};
            s.v[j] = {unit(rng), unit(rng)};
        }
        s.config = s.config.centered();
        if (s.config.min_pair_distance() >= 0.3) return s;
    }
}

// Synthetic constant-depth loop around an end (criterion 10).
ReducedPath loop_around(End end, double phi0, double dphi, int n = 600) {
    ReducedPath path;
    for (int i = 0; i <= n; ++i) {
        PathSample s;
        s.sigma = i * std::abs(dphi) / n;
        s.chart = Chart::Cusp;
        s.end = end;
        s.depth = 1.0;
        s.phi = phi0 + dphi * i / n;
        s.dphi = dphi >= 0 ? 1.0 : -1.0;
        s.u = cusp_chart_inverse({end, s.depth, s.phi}).u;
        path.samples.push_back(s);
    }
    return path;
}

void criteria_1_2() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(12345);
    double worst_lj = 0.0, worst_drift = 0.0;
    int used = 0;
    while (used < 20) {
        PlanarState s = random_bounded_state(rng);
        // bounded = no close approach within the horizon
        Trajectory traj = integrate(s, 0.5, 1e-10, 0.1);
        if (traj.collision_approach) continue;
        ++used;
        worst_lj = std::max(worst_lj, lagrange_jacobi_residual(traj));
        auto inv0 = conserved_quantities(traj.samples.front().state);
        double scale = std::max(1.0, std::abs(inv0.E));
        for (const auto& smp : traj.samples) {
            auto inv = conserved_quantities(smp.state);
            worst_drift = std::max(worst_drift, std::abs(inv.E - inv0.E) / scale);
            worst_drift = std::max(worst_drift, std::abs(inv.C - inv0.C) / scale);
        }
    }
    double dt = seconds_since(t0);
    line(1, "Lagrange-Jacobi identity", worst_lj <= 1e-9 && dt < 10.0,
         "max|I''-4E| = " + fmt(worst_lj) + ", " + fmt(dt) + " s");
    line(2, "E and C conservation", worst_drift <= 1e-8,
         "max relative drift = " + fmt(worst_drift));
}

void criterion_3() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    int used = 0;
    while (used < 100) {
        PlanarConfig c{{cplx(unit(rng), unit(rng)), cplx(unit(rng), unit(rng)),
                        cplx(unit(rng), unit(rng))}};
        c = c.centered();
        if (c.min_pair_distance() < 0.2) continue;
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
        worst = std::max(worst, submersion_check(c, w));
        ++used;
    }
    line(3, "submersion identity", worst <= 1e-8, "max relative error = " + fmt(worst));
}

void criterion_4() {
    auto t0 = std::chrono::steady_clock::now();
    int neg = 0, total = 0;
    double worst = -1e300;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            double th = kPi * (i + 0.5) / 100;
            double ph = 2 * kPi * j / 100;
            Vec3 u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                   std::cos(th)};
            bool excluded = false;
            for (End e : {End::B12, End::B13, End::B23})
                if (angle_between(u, collision_point(e)) < 0.05) excluded = true;
            if (excluded) continue;
            double K = gaussian_curvature(ShapePoint{u});
            worst = std::max(worst, K);
            ++total;
            if (K < 0.0) ++neg;
        }
    }
    // sanity: the formula with lambda = 1 returns the round curvature 4
    MetricData flat{};
    flat.lambda = 1.0;
    double K0 = gaussian_curvature(flat);
    double dt = seconds_since(t0);
    bool ok = total > 0 && (double)neg / total >= 0.999 && worst <= 1e-6 &&
              std::abs(K0 - 4.0) <= 1e-6 && dt < 30.0;
    line(4, "curvature negativity", ok,
         "negative at " + fmt(100.0 * neg / std::max(1, total)) + "% of " +
             std::to_string(total) + " nodes, max K = " + fmt(worst) +
             ", flat sanity K = " + fmt(K0) + ", " + fmt(dt) + " s");
}

void criterion_5() {
    double worst = 0.0;
    // equator, launched on arc 3
    {
        GeodesicState s = make_geodesic_state({1, 0, 0}, {0, 1, 0});
        for (const auto& smp : geodesic_flow(s, 5.0).samples)
            worst = std::max(worst, std::abs(smp.u.z));
    }
    // the three symmetry meridians: pole -> collision point great circles
    for (End e : {End::B12, End::B13, End::B23}) {
        Vec3 b = collision_point(e);
        Vec3 n = normalized(cross(Vec3{0, 0, 1}, b));
        GeodesicState s = make_geodesic_state({0, 0, 1}, b);
        for (const auto& smp : geodesic_flow(s, 5.0).samples)
            worst = std::max(worst, std::abs(dot(smp.u, n)));
    }
    line(5, "seams and symmetry meridians are geodesics", worst <= 1e-6,
         "max plane deviation = " + fmt(worst));
}

std::map<std::string, std::pair<CollisionOrbit, CollisionOrbit>> criterion_6() {
    auto t0 = std::chrono::steady_clock::now();
    std::map<std::string, std::pair<CollisionOrbit, CollisionOrbit>> found;
    const char* targets[] = {"1", "2", "3", "12", "13", "21", "23", "31", "32"};
    bool ok = true;
    std::string detail;
    double worst_window = 0.0, worst_align = 0.0, min_depth = 1e300;
    try {
        for (const char* t : targets) {
            SyzygySequence target = SyzygySequence::parse(t);
            auto pair = find_straight(target);
            const auto& [o1, o2] = pair;
            for (const CollisionOrbit* o : {&o1, &o2}) {
                if (o->realized.symbols != target.symbols) ok = false;
                if (o->start_tail.kind != TailClass::Straight ||
                    o->finish_tail.kind != TailClass::Straight)
                    ok = false;
                min_depth = std::min({min_depth, o->start_tail.max_depth,
                                      o->finish_tail.max_depth});
                worst_window = std::max(worst_window, o->shot.window);
            }
            worst_align =
                std::max(worst_align, aligned_core_distance(mirror(o1).path, o2.path));
            found.emplace(t, std::move(pair));
        }
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what() + "; ";
    }
    double dt = seconds_since(t0);
    ok = ok && min_depth >= 8.0 && worst_window <= 1e-10 && worst_align <= 1e-6 &&
         dt < 600.0;
    line(6, "two straight orbits per target", ok,
         detail + "min tail depth = " + fmt(min_depth) + ", max window = " +
             fmt(worst_window) + ", max mirror misalignment = " + fmt(worst_align) +
             ", " + fmt(dt) + " s");
    return found;
}

void criterion_7(const std::pair<CollisionOrbit, CollisionOrbit>* pair31) {
    if (!pair31) {
        line(7, "the 31 pair crosses arc 3 then arc 1", false, "31 pair unavailable");
        return;
    }
    bool ok = true;
    for (const CollisionOrbit* o : {&pair31->first, &pair31->second}) {
        auto crossings = detect_crossings(o->path);
        if (crossings.size() != 2 || crossings[0].arc != 3 || crossings[1].arc != 1)
            ok = false;
        if (crossings.size() == 2 && crossings[0].sigma >= crossings[1].sigma)
            ok = false;
    }
    // CSV export round trip
    std::size_t rows = 0;
    auto csv = std::filesystem::temp_directory_path() / "p3b_acceptance_31.csv";
    {
        std::ofstream out(csv);
        write_path_csv(out, pair31->first.path);
    }
    {
        std::ifstream in(csv);
        ReducedPath back = read_path_csv(in);
        rows = back.samples.size();
        if (rows != pair31->first.path.samples.size()) ok = false;
    }
    std::filesystem::remove(csv);
    line(7, "the 31 pair crosses arc 3 then arc 1", ok,
         "both paths code 31 with no other crossing, CSV rows = " +
             std::to_string(rows));
}

void criterion_8(const CollisionOrbit* straight1) {
    if (!straight1) {
        line(8, "winding families of the 1 orbit", false, "1 orbit unavailable");
        return;
    }
    bool ok = true;
    std::string detail;
    try {
        for (double eps : {1e-3, 1e-2}) {
            auto family = find_winding(*straight1, eps, 3);
            int plus = 0, minus = 0;
            for (const CollisionOrbit& w : family) {
                if (w.id.find("-W-p") != std::string::npos) ++plus;
                if (w.id.find("-W-m") != std::string::npos) ++minus;
                if (w.start_end != End::B23 || w.finish_end != End::B23) ok = false;
                if (w.start_tail.kind != TailClass::Winding ||
                    w.finish_tail.kind != TailClass::Winding)
                    ok = false;
                // core code preserved
                std::vector<int> core(w.realized.symbols.begin() + w.realized.left_tail,
                                      w.realized.symbols.end() - w.realized.right_tail);
                if (core != std::vector<int>{1}) ok = false;
                // tails alternate arcs 2 and 3 (the arcs adjacent to B23)
                for (std::size_t i = 0; i < w.realized.symbols.size(); ++i) {
                    bool in_tail = i < w.realized.left_tail ||
                                   i + w.realized.right_tail >= w.realized.symbols.size();
                    if (!in_tail) continue;
                    int s = w.realized.symbols[i];
                    if (s != 2 && s != 3) ok = false;
                }
                for (std::size_t i = 1; i < w.realized.left_tail; ++i)
                    if (w.realized.symbols[i] == w.realized.symbols[i - 1]) ok = false;
            }
            if (plus < 3 || minus < 3) ok = false;
            // distinct family members
            for (std::size_t a = 0; a < family.size(); ++a)
                for (std::size_t b = a + 1; b < family.size(); ++b)
                    if (max_pointwise_distance(family[a].path, family[b].path) <= 1e-9)
                        ok = false;
            detail += "eps " + fmt(eps) + ": " + std::to_string(plus) + "+" +
                      std::to_string(minus) + " members; ";
        }
    } catch (const std::exception& e) {
        ok = false;
        detail += std::string("exception: ") + e.what();
    }
    line(8, "winding families of the 1 orbit", ok, detail);
}

void criterion_9(const CollisionOrbit* orbit31) {
    if (!orbit31) {
        line(9, "lift of the 31 orbit solves the equations of motion", false,
             "31 orbit unavailable");
        return;
    }
    bool ok = true;
    std::string detail;
    try {
        LiftedOrbit lifted = horizontal_lift(orbit31->path);
        ResidualReport rep = verify_solution(lifted, 1e-5);
        ok = rep.passed && rep.eq1_residual <= 1e-5 && rep.max_abs_E <= 1e-8 &&
             rep.max_abs_C <= 1e-10 && rep.max_abs_I_err <= 1e-8 &&
             rep.pair_distance_monotone && rep.t_collision_converged;
        detail = "eq1 = " + fmt(rep.eq1_residual) + ", |E| = " + fmt(rep.max_abs_E) +
                 ", |C| = " + fmt(rep.max_abs_C) + ", |I-1| = " +
                 fmt(rep.max_abs_I_err) + ", t_c = " + fmt(rep.t_collision);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    line(9, "lift of the 31 orbit solves the equations of motion", ok, detail);
}

void criterion_10() {
    bool ok = true;
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> sym(1, 3), len(0, 40);
    for (int k = 0; k < 1000; ++k) {
        SyzygySequence w;
        w.symbols.resize(len(rng));
        for (int& s : w.symbols) s = sym(rng);
        SyzygySequence once = cancel_stutters(w);
        for (std::size_t i = 0; i + 1 < once.symbols.size(); ++i)
            if (once.symbols[i] == once.symbols[i + 1]) ok = false;
        if (cancel_stutters(once).symbols != once.symbols) ok = false;
    }
    if (cancel_stutters(SyzygySequence::parse("1233")).symbols !=
        std::vector<int>{1, 2})
        ok = false;
    // a loop around B12 codes alternating 1,2
    SyzygySequence loop = code(loop_around(End::B12, 0.4, 4 * kPi));
    bool loop_ok = loop.symbols.size() == 4;
    for (std::size_t i = 0; i < loop.symbols.size(); ++i) {
        if (loop.symbols[i] != (i % 2 == 0 ? 2 : 1)) loop_ok = false;
    }
    ok = ok && loop_ok;
    line(10, "syzygy coder properties", ok,
         "1000 words idempotent, 1233 -> 12, B12 loop = " + loop.str());
}

void criterion_11() {
    bool ok = true;
    std::string detail;
    try {
        SyzygySequence target = SyzygySequence::parse("31");
        FindOptions opt4, opt6;
        opt4.d0 = 4.0;
        opt6.d0 = 6.0;
        CollisionOrbit a = find_straight(target, opt4).first;
        CollisionOrbit b = find_straight(target, opt6).first;
        double dist = aligned_core_distance(a.path, b.path);
        ok = dist <= 1e-4;
        detail = "core distance d0 4 vs 6 = " + fmt(dist);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    line(11, "launch depth robustness", ok, detail);
}

}  // namespace

int main() {
    criteria_1_2();
    criterion_3();
    criterion_4();
    criterion_5();
    auto found = criterion_6();
    auto it31 = found.find("31");
    auto it1 = found.find("1");
    criterion_7(it31 != found.end() ? &it31->second : nullptr);
    criterion_8(it1 != found.end() ? &it1->second.first : nullptr);
    criterion_9(it31 != found.end() ? &it31->second.first : nullptr);
    criterion_10();
    criterion_11();
    std::printf("%d of 11 criteria passed\n", 11 - g_failures);
    return g_failures;
}
