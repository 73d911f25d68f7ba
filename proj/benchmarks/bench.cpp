#include <benchmark/benchmark.h>

#include "p3b/dynamics.hpp"
#include "p3b/geodesic.hpp"
#include "p3b/shape.hpp"

using namespace p3b;

namespace {

PlanarState sample_state() {
    PlanarState s;
    s.config.q = {cplx(0.7, 0.1), cplx(-0.4, 0.5), cplx(-0.3, -0.6)};
    s.v = {cplx(0.2, -0.3), cplx(-0.1, 0.4), cplx(-0.1, -0.1)};
    return s;
}

void BM_potential(benchmark::State& state) {
    PlanarConfig c = sample_state().config;
    for (auto _ : state) benchmark::DoNotOptimize(potential(c));
}
BENCHMARK(BM_potential);

void BM_acceleration(benchmark::State& state) {
    PlanarConfig c = sample_state().config;
    for (auto _ : state) benchmark::DoNotOptimize(acceleration(c));
}
BENCHMARK(BM_acceleration);

void BM_integrate_planar(benchmark::State& state) {
    PlanarState s = sample_state();
    for (auto _ : state) {
        Trajectory traj = integrate(s, 0.1, 1e-10, 0.1);
        benchmark::DoNotOptimize(traj.samples.size());
    }
}
BENCHMARK(BM_integrate_planar);

void BM_conformal_factor(benchmark::State& state) {
    ShapePoint p{normalized(Vec3{0.3, -0.5, 0.7})};
    for (auto _ : state) benchmark::DoNotOptimize(conformal_factor(p).lap_log_lambda);
}
BENCHMARK(BM_conformal_factor);

void BM_gaussian_curvature(benchmark::State& state) {
    ShapePoint p{normalized(Vec3{0.3, -0.5, 0.7})};
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_curvature(p));
}
BENCHMARK(BM_gaussian_curvature);

void BM_geodesic_flow_core(benchmark::State& state) {
    GeodesicState s = make_geodesic_state(normalized(Vec3{0.1, -0.2, 0.97}), {1, 2, 0});
    for (auto _ : state) {
        ReducedPath path = geodesic_flow(s, 1.0);
        benchmark::DoNotOptimize(path.samples.size());
    }
}
BENCHMARK(BM_geodesic_flow_core);

void BM_geodesic_flow_cusp(benchmark::State& state) {
    FlowOptions opt;
    opt.stop_at_depth = 6.0;
    for (auto _ : state) {
        ReducedPath path = geodesic_flow_from_cusp(End::B12, 0.0, 0.9, false, 50.0, opt);
        benchmark::DoNotOptimize(path.samples.size());
    }
}
BENCHMARK(BM_geodesic_flow_cusp);

void BM_cusp_depth_roundtrip(benchmark::State& state) {
    for (auto _ : state) {
        double d = cusp_depth_from_theta(End::B23, 1e-6, 1.1);
        benchmark::DoNotOptimize(cusp_theta_from_depth(End::B23, d, 1.1));
    }
}
BENCHMARK(BM_cusp_depth_roundtrip);

}  // namespace

BENCHMARK_MAIN();
