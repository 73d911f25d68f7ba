#include "p3b/runconfig.hpp"

#include <fstream>
#include <sstream>

#include "p3b/errors.hpp"

namespace p3b {

void RunConfig::validate() const {
    if (integrator_tol <= 0 || bisection_tol <= 0 || metric_cusp_guard <= 0 ||
        chart_guard <= 0 || collision_guard <= 0)
        throw InvalidInput("tolerances and guards must be positive");
    if (metric_cusp_guard >= chart_guard)
        throw InvalidInput("metric cusp guard must be smaller than the chart guard");
    if (d0 < 2.0) throw InvalidInput("launch depth must be at least 2");
    if (grid < 8) throw InvalidInput("scan grid must be at least 8");
    if (horizon_length <= 0 || horizon_depth <= 0)
        throw InvalidInput("horizons must be positive");
    if (workers < 1) throw InvalidInput("workers must be at least 1");
}

FindOptions RunConfig::find_options() const {
    FindOptions opt;
    opt.d0 = d0;
    opt.grid = grid;
    opt.window_tol = bisection_tol;
    opt.horizon_length = horizon_length;
    opt.horizon_depth = horizon_depth;
    opt.flow_tol = integrator_tol;
    opt.workers = workers;
    return opt;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw InvalidInput("malformed config line " + std::to_string(lineno));
            continue;
        }
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        try {
            if (key == "integrator_tol") cfg.integrator_tol = std::stod(val);
            else if (key == "bisection_tol") cfg.bisection_tol = std::stod(val);
            else if (key == "metric_cusp_guard") cfg.metric_cusp_guard = std::stod(val);
            else if (key == "chart_guard") cfg.chart_guard = std::stod(val);
            else if (key == "collision_guard") cfg.collision_guard = std::stod(val);
            else if (key == "d0") cfg.d0 = std::stod(val);
            else if (key == "horizon_length") cfg.horizon_length = std::stod(val);
            else if (key == "horizon_depth") cfg.horizon_depth = std::stod(val);
            else if (key == "grid") cfg.grid = std::stoi(val);
            else if (key == "eps") cfg.eps = std::stod(val);
            else if (key == "out_dir") cfg.out_dir = val;
            else if (key == "workers") cfg.workers = std::stoi(val);
            else if (key == "seed") cfg.seed = std::stoul(val);
            else throw InvalidInput("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw InvalidInput("bad value for " + key + " at line " +
                               std::to_string(lineno));
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace p3b
