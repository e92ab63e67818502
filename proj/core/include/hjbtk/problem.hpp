#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "hjbtk/types.hpp"

namespace hjbtk {

enum class ControlSetKind { CompactBox, CompactFinite, Cone };

/// Describes the control set A: a bounded box, a finite point set, or a
/// closed convex cone containing the origin (membership by predicate).
struct ControlSetDescriptor {
    ControlSetKind kind = ControlSetKind::CompactBox;
    int m = 1;  // control dimension

    // compact-box
    std::vector<std::pair<double, double>> bounds;
    // compact-finite
    std::vector<Vec> points;
    // cone: predicate; description is informational only
    std::function<bool(ConstSpan)> cone_membership;
    std::string cone_description;

    bool compact() const { return kind != ControlSetKind::Cone; }
    bool contains(ConstSpan a, double tol = 1e-9) const;

    static ControlSetDescriptor box(std::vector<std::pair<double, double>> b);
    static ControlSetDescriptor finite(std::vector<Vec> pts);
    static ControlSetDescriptor full_cone(int m);  // A = R^m
};

/// Growth exponents and coercivity constants. Declared metadata: checked by
/// report-style operations, never enforced during evaluation.
struct GrowthData {
    int p = 1;
    int q = 1;
    double M = 1.0;
    double C1 = 0.0;  // coercivity offset
    double C2 = 1.0;  // coercivity constant, must be > 0 for cone sets
    std::string modulus_descriptor = "lipschitz";

    void validate(bool cone) const;
};

/// Closed set with compact boundary where the value function vanishes.
struct TargetSet {
    std::function<bool(ConstSpan)> membership;
    std::function<double(ConstSpan)> distance;  // 0 exactly on the set
    double bounding_radius = 1.0;
};

using DynamicsFn = std::function<void(ConstSpan x, ConstSpan a, Span out)>;
using LagrangianFn = std::function<double(ConstSpan x, ConstSpan a)>;

/// A deterministic optimal control problem with nonnegative running cost.
/// Immutable after construction; evaluators must be pure.
struct ControlProblem {
    int n = 1;  // state dimension
    DynamicsFn f;
    LagrangianFn l;
    ControlSetDescriptor control_set;
    GrowthData growth;
    std::optional<DynamicsFn> f_recession;
    std::optional<LagrangianFn> l_recession;
    std::optional<TargetSet> target;
    std::string name;
};

enum class Recession { Dynamics, Lagrangian };

/// f(x,a) with membership and finiteness checks.
Vec eval_dynamics(const ControlProblem& problem, ConstSpan x, ConstSpan a);

/// l(x,a); throws ModelViolation if negative.
double eval_lagrangian(const ControlProblem& problem, ConstSpan x, ConstSpan a);

/// Recession value of f or l at (x,a). Uses the user-supplied evaluator when
/// present, otherwise extrapolates rho^q Phi(x, a/rho) along rho_k = 2^-k,
/// k = 4..20, and requires the tail to settle within relative 1e-6.
Vec recession(const ControlProblem& problem, Recession which, ConstSpan x,
              ConstSpan a);

struct CoercivityReport {
    double min_margin = 0.0;  // min of l - C2|a|^q + C1 over samples
    Vec worst_x, worst_a;
    int samples = 0;
    bool pass() const { return min_margin >= -1e-12; }
};

/// Samples l(x,a) - C2|a|^q + C1 over a state box times a control list.
CoercivityReport check_coercivity(const ControlProblem& problem,
                                  const std::vector<std::pair<double, double>>& x_box,
                                  const std::vector<Vec>& controls,
                                  int sample_budget, unsigned seed = 1234);

/// Catalogue of built-in problems:
///   example-3-3, example-4-1, lqr-1d, lqr-nd, ergodic-torus-1d.
/// Parameters (lqr): Q, R (scalars; lqr-nd: "n" plus diagonal values Q, R).
ControlProblem builtin(const std::string& name,
                       const std::map<std::string, double>& params = {});

}  // namespace hjbtk
