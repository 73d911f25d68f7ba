#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "p3b/dynamics.hpp"
#include "p3b/errors.hpp"
#include "p3b/lift.hpp"
#include "p3b/orbit.hpp"
#include "p3b/orbit_library.hpp"
#include "p3b/runconfig.hpp"
#include "p3b/shape.hpp"
#include "p3b/syzygy.hpp"

namespace fs = std::filesystem;
using namespace p3b;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

void write_path_file(const RunConfig& cfg, const std::string& name,
                     const ReducedPath& path) {
    std::ofstream out(out_path(cfg, name));
    if (!out) throw InvalidInput("cannot write " + name);
    write_path_csv(out, path);
}

OrbitRecord make_record(const CollisionOrbit& o, const std::string& kind,
                        const std::string& path_file) {
    OrbitRecord r;
    r.id = o.id;
    r.sequence = o.realized.str();
    r.kind = kind;
    r.start_end = end_name(o.start_end);
    r.finish_end = end_name(o.finish_end);
    r.d0 = o.shot.d0;
    r.phi_star = o.shot.phi_star;
    r.window = o.shot.window;
    r.mirror_of = o.mirror_of;
    r.path_file = path_file;
    return r;
}

void record_orbit(OrbitLibrary& lib, const RunConfig& cfg, const CollisionOrbit& o,
                  const std::string& kind) {
    std::string file = o.id + ".csv";
    write_path_file(cfg, file, o.path);
    lib.append(make_record(o, kind, file));
    std::cout << o.id << ": " << o.realized.str() << "  " << end_name(o.start_end)
              << " -> " << end_name(o.finish_end) << "  phi* = " << o.shot.phi_star
              << "  window = " << o.shot.window << "\n";
}

// Reduce a physical trajectory to a shape path with JM arclength, tangents by
// centered differences in sigma.
ReducedPath reduce_trajectory(const Trajectory& traj) {
    ReducedPath path;
    double sigma = 0.0;
    PlanarConfig prev;
    bool have_prev = false;
    for (const auto& sample : traj.samples) {
        const PlanarConfig& c = sample.state.config;
        if (c.centered().min_pair_distance() < kCollisionGuard) continue;
        if (have_prev) {
            double dq = 0.0;
            for (int j = 0; j < 3; ++j) dq += std::norm(c.q[j] - prev.q[j]);
            sigma += std::sqrt(potential(c) * dq);  // ds_JM = sqrt(U) |dq|
        }
        PathSample ps;
        ps.sigma = sigma;
        ps.u = shape_map(c.centered()).u;
        path.samples.push_back(ps);
        prev = c;
        have_prev = true;
    }
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        std::size_t a = i > 0 ? i - 1 : i;
        std::size_t b = i + 1 < path.samples.size() ? i + 1 : i;
        double h = path.samples[b].sigma - path.samples[a].sigma;
        if (h > 0)
            path.samples[i].w = (path.samples[b].u - path.samples[a].u) / h;
    }
    return path;
}

int run_check(const RunConfig& cfg) {
    int failures = 0;
    auto report = [&](const char* name, bool ok, double value) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << value << ")\n";
        if (!ok) ++failures;
    };
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // Lagrange-Jacobi + conservation on a few random states
    double worst_lj = 0, worst_drift = 0;
    for (int k = 0; k < 5; ++k) {
        PlanarState s;
        for (int j = 0; j < 3; ++j) {
            s.config.q[j] = {unit(rng), unit(rng)};
            s.v[j] = {unit(rng), unit(rng)};
        }
        s.config = s.config.centered();
        if (s.config.min_pair_distance() < 0.2) {
            --k;
            continue;
        }
        // bounded = no close approach within the horizon
        Trajectory traj = integrate(s, 0.5, 1e-10, 0.1);
        if (traj.collision_approach) {
            --k;
            continue;
        }
        worst_lj = std::max(worst_lj, lagrange_jacobi_residual(traj));
        auto inv0 = conserved_quantities(traj.samples.front().state);
        for (const auto& smp : traj.samples) {
            if (smp.state.config.min_pair_distance() < kCollisionGuard) continue;
            auto inv = conserved_quantities(smp.state);
            double scale = std::max(1.0, std::abs(inv0.E));
            worst_drift = std::max(worst_drift, std::abs(inv.E - inv0.E) / scale);
            worst_drift = std::max(worst_drift, std::abs(inv.C - inv0.C) / scale);
        }
    }
    report("lagrange-jacobi residual <= 1e-9", worst_lj <= 1e-9, worst_lj);
    report("E, C drift <= 1e-8", worst_drift <= 1e-8, worst_drift);

    // submersion identity on random horizontal vectors
    double worst_sub = 0;
    for (int k = 0; k < 20; ++k) {
        PlanarConfig c{{cplx(unit(rng), unit(rng)), cplx(unit(rng), unit(rng)),
                        cplx(unit(rng), unit(rng))}};
        c = c.centered();
        if (c.min_pair_distance() < 0.2) {
            --k;
            continue;
        }
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
        worst_sub = std::max(worst_sub, submersion_check(c, w));
    }
    report("submersion identity <= 1e-8", worst_sub <= 1e-8, worst_sub);

    // curvature sign on a coarse grid
    int neg = 0, total = 0;
    double worst_k = -1e300;
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 50; ++j) {
            double th = std::numbers::pi * (i + 0.5) / 50;
            double ph = 2 * std::numbers::pi * j / 50;
            Vec3 u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                   std::cos(th)};
            bool guarded = false;
            for (End e : {End::B12, End::B13, End::B23})
                if (angle_between(u, collision_point(e)) < 0.05) guarded = true;
            if (guarded) continue;
            double K = gaussian_curvature(ShapePoint{u});
            worst_k = std::max(worst_k, K);
            neg += K < 0;
            ++total;
        }
    }
    report("curvature < 0 off the guard disks", neg == total && worst_k <= 1e-6,
           worst_k);

    // seams stay put
    GeodesicState eq = make_geodesic_state({1, 0, 0}, {0, 1, 0});
    double dev = 0;
    for (const auto& s : geodesic_flow(eq, 5.0).samples)
        dev = std::max(dev, std::abs(s.u.z));
    report("equator is invariant <= 1e-6", dev <= 1e-6, dev);

    // syzygy coder
    SyzygySequence sq = SyzygySequence::parse("1233");
    bool ok = cancel_stutters(sq).str() == "12";
    report("cancel_stutters(1233) == 12", ok, ok);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced geodesic pipeline for the zero-energy equal-mass "
                 "inverse-cube planar 3-body problem"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    RunConfig cfg;
    std::string config_file;
    app.add_option("--config", config_file, "key = value configuration file");
    // flags override file values: parse the file in a pre-parse hook
    app.preparse_callback([&](std::size_t) {
        if (!config_file.empty()) cfg = RunConfig::load(config_file);
    });
    // the config file may also be named before flag parsing; simplest is to
    // scan argv for --config up front
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") cfg = RunConfig::load(argv[i + 1]);

    app.add_option("--tol", cfg.integrator_tol, "integrator tolerance");
    app.add_option("--d0", cfg.d0, "shooting launch depth");
    app.add_option("--horizon", cfg.horizon_length, "reduced-length horizon");
    app.add_option("--grid", cfg.grid, "scan / curvature grid size");
    app.add_option("--eps", cfg.eps, "winding perturbation size");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--workers", cfg.workers, "worker pool size");
    app.add_option("--seed", cfg.seed, "seed for randomized sampling");

    std::string state_file, traj_file, sequence, orbit_id;
    double t_end = 1.0;

    auto* simulate = app.add_subcommand("simulate", "integrate the equations of motion");
    simulate->add_option("state", state_file, "initial state file (12 numbers)")
        ->required();
    simulate->add_option("--t-end", t_end, "integration time");

    auto* reduce = app.add_subcommand("reduce", "trajectory -> shape path + code");
    reduce->add_option("trajectory", traj_file, "trajectory CSV")->required();

    app.add_subcommand("curvature", "curvature map CSV over a spherical grid");

    auto* find = app.add_subcommand("find", "find the straight orbit pair");
    find->add_option("sequence", sequence, "target syzygy sequence")->required();

    auto* wind = app.add_subcommand("wind", "winding family around a straight orbit");
    wind->add_option("sequence", sequence, "target syzygy sequence")->required();

    auto* lift_cmd = app.add_subcommand("lift", "lift an orbit and verify it");
    lift_cmd->add_option("orbit", orbit_id, "orbit id from the library")->required();

    app.add_subcommand("check", "run the invariant spot checks");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.validate();
        if (simulate->parsed()) {
            std::ifstream in(state_file);
            if (!in) throw InvalidInput("cannot open state file: " + state_file);
            PlanarState s = read_state(in);
            Trajectory traj = integrate(s.config.is_centered(1e-9)
                                            ? s
                                            : PlanarState{s.config.centered(), s.v},
                                        t_end, cfg.integrator_tol);
            std::ofstream out(out_path(cfg, "trajectory.csv"));
            write_trajectory_csv(out, traj);
            std::cout << "wrote " << out_path(cfg, "trajectory.csv") << " ("
                      << traj.samples.size() << " samples"
                      << (traj.collision_approach ? ", stopped near collision" : "")
                      << ")\n";
        } else if (reduce->parsed()) {
            std::ifstream in(traj_file);
            if (!in) throw InvalidInput("cannot open trajectory: " + traj_file);
            Trajectory traj = read_trajectory_csv(in);
            ReducedPath path = reduce_trajectory(traj);
            write_path_file(cfg, "shape_path.csv", path);
            SyzygySequence seq = cancel_stutters(code(path));
            std::cout << "wrote " << out_path(cfg, "shape_path.csv") << "\n"
                      << "syzygy code: " << (seq.symbols.empty() ? "(empty)" : seq.str())
                      << "\n";
        } else if (app.get_subcommand("curvature")->parsed()) {
            std::ofstream out(out_path(cfg, "curvature.csv"));
            write_curvature_csv(out, cfg.grid, cfg.grid);
            std::cout << "wrote " << out_path(cfg, "curvature.csv") << "\n";
        } else if (find->parsed()) {
            auto target = SyzygySequence::parse(sequence);
            auto [o1, o2] = find_straight(target, cfg.find_options());
            OrbitLibrary lib(out_path(cfg, "orbits.json"));
            record_orbit(lib, cfg, o1, "straight");
            record_orbit(lib, cfg, o2, "straight");
        } else if (wind->parsed()) {
            auto target = SyzygySequence::parse(sequence);
            auto [o1, o2] = find_straight(target, cfg.find_options());
            auto family = find_winding(o1, cfg.eps, 3, cfg.find_options());
            OrbitLibrary lib(out_path(cfg, "orbits.json"));
            for (const auto& o : family) record_orbit(lib, cfg, o, "winding");
        } else if (lift_cmd->parsed()) {
            OrbitLibrary lib(out_path(cfg, "orbits.json"));
            const OrbitRecord* rec = lib.find(orbit_id);
            if (!rec) throw InvalidInput("orbit not in library: " + orbit_id);
            std::ifstream in(out_path(cfg, rec->path_file));
            if (!in) throw InvalidInput("missing path file: " + rec->path_file);
            ReducedPath path = read_path_csv(in);
            LiftedOrbit lifted = horizontal_lift(path);
            ResidualReport rep = verify_solution(lifted);
            std::ofstream tcsv(out_path(cfg, orbit_id + "-lift.csv"));
            write_trajectory_csv(tcsv, lifted.trajectory);
            std::ofstream report(out_path(cfg, orbit_id + "-verify.txt"));
            auto emit = [&](std::ostream& os) {
                os << "orbit: " << orbit_id << "\n"
                   << "eq1_residual_rel: " << rep.eq1_residual << "\n"
                   << "max_abs_E: " << rep.max_abs_E << "\n"
                   << "max_abs_C: " << rep.max_abs_C << "\n"
                   << "max_abs_I_err: " << rep.max_abs_I_err << "\n"
                   << "horizontality: " << rep.max_horizontality << "\n"
                   << "pair_distance_monotone: " << rep.pair_distance_monotone << "\n"
                   << "final_pair_distance: " << rep.final_pair_distance << "\n"
                   << "t_collision: " << rep.t_collision << "\n"
                   << "t_collision_converged: " << rep.t_collision_converged << "\n"
                   << "status: " << (rep.passed ? "verified" : "FAILED") << "\n";
            };
            emit(report);
            emit(std::cout);
            if (!rep.passed) return 1;
        } else {
            return run_check(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
