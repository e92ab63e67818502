#pragma once

#include <optional>

#include "hjbtk/fields.hpp"
#include "hjbtk/hamiltonians.hpp"

namespace hjbtk {

/// One-step model shared by every semi-Lagrangian scheme: for a state and a
/// mesh point it yields velocity, running cost, and the physical-time density
/// w0^q (identically 1 for compact control sets).
struct SchemeModel {
    int n = 0;
    bool extended = false;
    const ControlMesh* mesh = nullptr;
    // velocity / cost / w0^q of mesh point k at state x
    std::function<void(ConstSpan x, std::size_t k, Span vel, double& cost,
                       double& w0q)>
        eval;

    static SchemeModel compact(const ControlProblem& problem,
                               const ControlMesh& mesh);
    static SchemeModel extended_model(const ExtendedProblem& ext,
                                      const ControlMesh& mesh);
    /// Picks compact or extended automatically (extends cone problems).
    static SchemeModel for_problem(const ControlProblem& problem,
                                   const ControlMesh& mesh);
};

struct SolverConfig {
    const ControlMesh* mesh = nullptr;  // required; not owned
    double dt = 0.05;                 // step in s (extended) or t (compact)
    double tol = 1e-6;
    int max_iterations = 100000;
    double infinity_threshold = 1e4;  // value above which growth means +inf
    double growth_slope = 1e-4;       // minimal growth per schedule step
    int threads = 1;
    bool clamp_boundary = true;       // non-periodic boundary policy
};

enum class Verdict { Converged, BudgetExhausted, Diverged };

struct ConvergenceRecord {
    double parameter = 0.0;  // horizon, delta, or iteration count
    double sup_change = 0.0;
    double residual = 0.0;
    double seconds = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRecord> records;
    Verdict verdict = Verdict::BudgetExhausted;
    bool cfl_warning = false;
    std::size_t boundary_clamps = 0;
    std::size_t provisional_nodes = 0;

    std::string to_json() const;
};

/// One monotone semi-Lagrangian step
///   u'(x) = min_k [ dt*l_k(x) + discount_k * u(x + dt*f_k(x)) ].
/// discount_k = exp(-delta*dt*w0q_k); kruzkov instead uses
///   u'(x) = min_k [ (1-e^{-dt l_k}) + e^{-dt l_k} u(x + dt f_k) ].
/// target_mask nodes (if given) are clamped to 0.
ValueField sl_step(const SchemeModel& model, const ValueField& u, double dt,
                   double delta = 0.0, bool kruzkov = false,
                   const std::vector<char>* target_mask = nullptr,
                   int threads = 1, std::size_t* clamps = nullptr,
                   std::vector<std::size_t>* argmin = nullptr);

struct FiniteHorizonResult {
    std::vector<ValueField> snapshots;  // one per requested physical time
    std::vector<double> snapshot_times;
    ValueField final_field;             // value at the last step (s-horizon)
    ValueField credit;                  // accumulated physical time per node
    ConvergenceReport report;
};

/// Marches u_t + H(x,Du) = 0 from u(0,.) = 0. Extended problems run in
/// s-time with per-node physical-time credit dt*w0^q along the minimizing
/// control; snapshots at physical times interpolate the (credit, value)
/// history per node.
FiniteHorizonResult solve_finite_horizon(const ControlProblem& problem,
                                         const Grid& grid,
                                         const SolverConfig& config, double T,
                                         std::vector<double> snapshot_times = {});

struct LimitResult {
    ValueField field;
    ConvergenceReport report;
};

/// Node-wise limit of the finite-horizon values over an increasing horizon
/// schedule (s-horizons for extended problems). Nodes above the infinity
/// threshold that keep growing are marked infinite.
LimitResult limit_finite_horizon(const ControlProblem& problem, const Grid& grid,
                                 const SolverConfig& config,
                                 const std::vector<double>& horizons);

/// Fixed point of the discounted operator; contraction monitored empirically.
LimitResult solve_discounted(const ControlProblem& problem, const Grid& grid,
                             const SolverConfig& config, double delta,
                             const ValueField* warm_start = nullptr);

/// Node-wise monotone limit of solve_discounted over a decreasing schedule.
LimitResult limit_discounted(const ControlProblem& problem, const Grid& grid,
                             const SolverConfig& config,
                             const std::vector<double>& deltas);

struct KruzkovResult {
    ValueField U;            // in [0,1]
    ValueField V;            // -log(1-U), infinite where U ~ 1
    std::vector<char> domain_mask;
    ConvergenceReport report;
};

/// Kruzkov boundary-value problem: U = 0 clamped on target nodes; recovers
/// V and the domain mask {U < 1 - e^{-infinity_threshold}}.
KruzkovResult solve_kruzkov(const ControlProblem& problem, const Grid& grid,
                            const SolverConfig& config, const TargetSet& target);

struct ErgodicResult {
    double lambda = 0.0;
    ValueField corrector;    // W0 = V_delta - V_delta(origin) at smallest delta
    double flatness = 0.0;   // max-min of delta*V_delta at the final delta
    double residual = 0.0;   // max |H_tilde(x, DW0)| on finite-difference grads
    ConvergenceReport report;
};

/// Vanishing-discount ergodic solve on a fully periodic grid.
ErgodicResult solve_ergodic(const ControlProblem& problem, const Grid& grid,
                            const SolverConfig& config,
                            const std::vector<double>& deltas,
                            double flatness_tol = 0.05);

/// Default geometric delta schedule 2^-1 .. 2^-12.
std::vector<double> default_delta_schedule(int k_max = 12);

}  // namespace hjbtk
