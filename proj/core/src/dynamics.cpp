#include "p3b/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "p3b/ode.hpp"

namespace p3b {

bool PlanarConfig::is_centered(double tol) const {
    return std::abs(q[0] + q[1] + q[2]) <= tol;
}

PlanarConfig PlanarConfig::centered() const {
    cplx com = (q[0] + q[1] + q[2]) / 3.0;
    return {{q[0] - com, q[1] - com, q[2] - com}};
}

double PlanarConfig::min_pair_distance() const {
    double d01 = std::abs(q[0] - q[1]);
    double d02 = std::abs(q[0] - q[2]);
    double d12 = std::abs(q[1] - q[2]);
    return std::min({d01, d02, d12});
}

double potential(const PlanarConfig& config, double guard) {
    if (config.min_pair_distance() < guard)
        throw DegenerateConfiguration("pair distance below collision guard");
    double u = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k)
            u += 1.0 / std::norm(config.q[j] - config.q[k]);
    return u;
}

std::array<cplx, 3> acceleration(const PlanarConfig& config, double guard) {
    if (config.min_pair_distance() < guard)
        throw DegenerateConfiguration("pair distance below collision guard");
    std::array<cplx, 3> acc{};
    for (int j = 0; j < 3; ++j) {
        for (int k = j + 1; k < 3; ++k) {
            cplx d = config.q[j] - config.q[k];
            double r2 = std::norm(d);
            cplx f = -2.0 * d / (r2 * r2);
            acc[j] += f;
            acc[k] -= f;
        }
    }
    return acc;
}

ConservedQuantities conserved_quantities(const PlanarState& state) {
    double kin = 0.0, C = 0.0, I = 0.0, Idot = 0.0;
    for (int j = 0; j < 3; ++j) {
        kin += 0.5 * std::norm(state.v[j]);
        C += std::imag(std::conj(state.config.q[j]) * state.v[j]);
        I += std::norm(state.config.q[j]);
        Idot += 2.0 * std::real(std::conj(state.config.q[j]) * state.v[j]);
    }
    return {kin - potential(state.config), C, I, Idot};
}

double inertia_second_derivative(const PlanarState& state) {
    auto acc = acceleration(state.config);
    double out = 0.0;
    for (int j = 0; j < 3; ++j) {
        out += 2.0 * std::norm(state.v[j]);
        out += 2.0 * std::real(std::conj(state.config.q[j]) * acc[j]);
    }
    return out;
}

namespace {

using Y = OdeState<12>;

Y pack(const PlanarState& s) {
    Y y;
    for (int j = 0; j < 3; ++j) {
        y[2 * j] = s.config.q[j].real();
        y[2 * j + 1] = s.config.q[j].imag();
        y[6 + 2 * j] = s.v[j].real();
        y[6 + 2 * j + 1] = s.v[j].imag();
    }
    return y;
}

PlanarState unpack(const Y& y) {
    PlanarState s;
    for (int j = 0; j < 3; ++j) {
        s.config.q[j] = {y[2 * j], y[2 * j + 1]};
        s.v[j] = {y[6 + 2 * j], y[6 + 2 * j + 1]};
    }
    return s;
}

}  // namespace

Trajectory integrate(const PlanarState& initial, double t_end, double tol, double guard,
                     double max_step) {
    Trajectory traj;
    traj.tol = tol;
    if (initial.config.min_pair_distance() < guard)
        throw DegenerateConfiguration("initial configuration inside collision guard");

    Y y = pack(initial);
    traj.samples.push_back({0.0, initial});

    auto rhs = [](double, const Y& y, Y& dydt) {
        PlanarState s = unpack(y);
        auto acc = acceleration(s.config, 0.0);
        for (int j = 0; j < 3; ++j) {
            dydt[2 * j] = s.v[j].real();
            dydt[2 * j + 1] = s.v[j].imag();
            dydt[6 + 2 * j] = acc[j].real();
            dydt[6 + 2 * j + 1] = acc[j].imag();
        }
    };

    auto observer = [&](double t, Y& y, double) {
        PlanarState s = unpack(y);
        traj.samples.push_back({t, s});
        if (s.config.min_pair_distance() < guard) {
            traj.collision_approach = true;
            return StepControl::Stop;
        }
        return StepControl::Continue;
    };

    OdeStats stats = integrate_ode<12>(rhs, 0.0, t_end, y, tol, max_step, observer);
    traj.steps_accepted = stats.accepted;
    traj.steps_rejected = stats.rejected;
    if (stats.step_underflow) traj.collision_approach = true;
    return traj;
}

double lagrange_jacobi_residual(const Trajectory& traj) {
    if (traj.samples.size() < 3)
        throw InvalidInput("lagrange_jacobi_residual needs at least 3 samples");
    double worst = 0.0;
    for (const auto& sample : traj.samples) {
        // the final sample of a collision-approach run may sit inside the guard
        if (sample.state.config.min_pair_distance() < kCollisionGuard) continue;
        double iddot = inertia_second_derivative(sample.state);
        double e = conserved_quantities(sample.state).E;
        worst = std::max(worst, std::abs(iddot - 4.0 * e));
    }
    return worst;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,x1,y1,x2,y2,x3,y3,vx1,vy1,vx2,vy2,vx3,vy3,E,C,I\n";
    out.precision(17);
    for (const auto& sample : traj.samples) {
        const auto& s = sample.state;
        auto inv = conserved_quantities(s);
        out << sample.t;
        for (int j = 0; j < 3; ++j)
            out << ',' << s.config.q[j].real() << ',' << s.config.q[j].imag();
        for (int j = 0; j < 3; ++j)
            out << ',' << s.v[j].real() << ',' << s.v[j].imag();
        out << ',' << inv.E << ',' << inv.C << ',' << inv.I << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty trajectory CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        double t;
        if (!(ls >> t)) throw InvalidInput("malformed trajectory CSV row");
        PlanarState s;
        double vals[12];
        for (double& v : vals)
            if (!(ls >> v)) throw InvalidInput("short trajectory CSV row");
        for (int j = 0; j < 3; ++j) {
            s.config.q[j] = {vals[2 * j], vals[2 * j + 1]};
            s.v[j] = {vals[6 + 2 * j], vals[6 + 2 * j + 1]};
        }
        traj.samples.push_back({t, s});
    }
    return traj;
}

PlanarState read_state(std::istream& in) {
    std::array<double, 12> vals;
    for (double& v : vals) {
        if (!(in >> v)) throw InvalidInput("expected 12 numbers for a planar state");
    }
    PlanarState s;
    for (int j = 0; j < 3; ++j) {
        s.config.q[j] = {vals[2 * j], vals[2 * j + 1]};
        s.v[j] = {vals[6 + 2 * j], vals[6 + 2 * j + 1]};
    }
    return s;
}

}  // namespace p3b
