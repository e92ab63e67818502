#pragma once

#include "hjbtk/mesh.hpp"
#include "hjbtk/solvers.hpp"

namespace hjbtk {

/// C1 certificate candidate: value and gradient evaluators.
struct Certificate {
    std::function<double(ConstSpan)> value;
    std::function<Vec(ConstSpan)> gradient;
};

using RateFn = std::function<double(double)>;  // increasing, rate(0) = 0

struct SampleRegion {
    Vec lo, hi;
};

struct MarginReport {
    double worst_margin = 0.0;
    Vec argmin_point;
    std::size_t samples = 0;
    bool pass = false;
    bool positivity_ok = true;  // U > 0 held at every sample off target
    std::string to_json() const;
};

/// Minimum-restraint check: at low-discrepancy samples x in the region off
/// target, computes min over the control mesh (truncated to |a| <= R(U(x))
/// when radius_map is given) of <grad U(x), f(x,a)> + k l(x,a). Passes when
/// the worst (largest) sample margin is negative.
MarginReport check_mrf(const ControlProblem& problem, const Certificate& U,
                       const TargetSet& target, double k,
                       const SampleRegion& region, const ControlMesh& mesh,
                       std::size_t samples = 10000, unsigned seed = 0,
                       RateFn radius_map = nullptr);

/// Decrease condition on S(A): max over the extended mesh of
/// <grad U, f_bar> + m(d(x)) at samples; passes when the worst margin <= 0.
MarginReport check_sc1(const ExtendedProblem& ext, const Certificate& U,
                       const TargetSet& target, const RateFn& m,
                       const SampleRegion& region, const ControlMesh& mesh,
                       std::size_t samples = 10000, unsigned seed = 0);

/// Lagrangian lower bound: min over the mesh of l(x,a) - c1(d(x)) at samples
/// off target; passes when the worst (smallest) margin >= 0.
MarginReport check_sc2(const ControlProblem& problem, const TargetSet& target,
                       const RateFn& c1, const SampleRegion& region,
                       const ControlMesh& mesh, std::size_t samples = 10000,
                       unsigned seed = 0);

struct ProbeOptions {
    double dt = 0.01;
    double delta = 0.0;    // discount of the solved field, 0 for undiscounted
    bool kruzkov = false;  // field is a Kruzkov transform
    double tol = 1e-2;     // distance below which the target counts as reached
};

struct ProbeReport {
    double min_distance = 0.0;
    double s_at_min = 0.0;
    bool reached = false;
    std::vector<std::pair<double, double>> trace;  // (s, d(xi(s)))
};

/// Simulates the feedback synthesized from a solved value field (greedy
/// one-step minimization, the same model as the solver) and reports the
/// running minimum of the target distance over the s-budget.
ProbeReport probe_h3(const ControlProblem& problem, const ControlMesh& mesh,
                     const ValueField* field, ConstSpan x,
                     const TargetSet& target, double s_budget,
                     const ProbeOptions& options = {});

/// Halton point i (1-based) of the given dimension, scaled into the region.
Vec halton_point(std::size_t i, const SampleRegion& region);

}  // namespace hjbtk
