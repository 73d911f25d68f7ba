#pragma once

#include <string>

#include "p3b/orbit.hpp"

namespace p3b {

// Run-wide configuration. Loadable from a key = value text file; command-line
// flags override file values (handled by the CLI layer).
struct RunConfig {
    double integrator_tol = 1e-11;
    double bisection_tol = 1e-10;
    double metric_cusp_guard = 1e-3;
    double chart_guard = 0.05;
    double collision_guard = 1e-6;
    double d0 = 5.0;
    double horizon_length = 40.0;
    double horizon_depth = 8.0;
    int grid = 720;
    double eps = 1e-3;
    std::string out_dir = ".";
    int workers = 1;
    unsigned long seed = 12345;

    void validate() const;  // throws InvalidInput on bad values
    FindOptions find_options() const;

    static RunConfig load(const std::string& path);
};

}  // namespace p3b
