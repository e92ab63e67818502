#pragma once

#include <optional>

#include "hjbtk/extension.hpp"
#include "hjbtk/mesh.hpp"

namespace hjbtk {

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> payoff;   // accumulated running cost at times[i]
    bool blew_up = false;         // |y| exceeded 1e12
    double truncation_time = 0.0; // valid when blew_up
    // A-priori growth estimate |y(t)| <= (|x| + Mt + M I(t)) e^{M(t + I(t))}
    // with I(t) = integral of |alpha|^p; checked against the declared M.
    bool bound_satisfied = true;
    double worst_bound_ratio = 0.0;  // max |y| / bound over samples
};

/// Fixed-step RK4 on (y, cost) for a piecewise-constant control on [0, T].
Trajectory integrate(const ControlProblem& problem, ConstSpan x,
                     const TimedControl& alpha, double T, double dt);

/// The +/-1 square wave with n pieces on [0, t]: value (-1)^i on
/// [i t/n, (i+1) t/n), so the first piece is +1.
TimedControl chattering_control(int n, double t);

struct BruteForceOptions {
    // Clamp each Euler destination into [lo, hi] componentwise, mirroring the
    // solver's clamped interpolation at node-aligned destinations.
    std::optional<std::pair<Vec, Vec>> clamp_box;
};

/// Exact minimum of the Euler-discretized payoff over all piecewise-constant
/// control sequences on the mesh: steps of y' = y + dt f, cost += dt l
/// (extended meshes use f_bar, l_bar). Enumeration budget mesh^steps <= 1e7.
double brute_force_value(const ControlProblem& problem, ConstSpan x,
                         const ControlMesh& mesh, int steps, double dt,
                         const BruteForceOptions& options = {});

}  // namespace hjbtk
