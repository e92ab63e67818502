#pragma once

#include <memory>

#include "hjbtk/problem.hpp"

namespace hjbtk {

/// A point of S(A) = (R+ x A) with w0^q + |w|^q = 1.
struct ExtendedControlPoint {
    double w0 = 1.0;
    Vec w;

    /// Membership defect |w0^q + |w|^q - 1|.
    double defect(int q) const;
};

/// Builds an S(A) point from a direction in A and a radius r in [0,1]:
/// w = r*dir (|dir| = 1), w0 = (1 - r^q)^(1/q). Poles are hit exactly.
ExtendedControlPoint extended_point(ConstSpan dir, double r, int q);

/// Compactified problem on S(A): f-bar / l-bar per the w0^q-scaling with
/// recession values on the w0 = 0 face.
class ExtendedProblem {
public:
    explicit ExtendedProblem(ControlProblem base);

    const ControlProblem& base() const { return *base_; }
    int n() const { return base_->n; }
    int m() const { return base_->control_set.m; }
    int q() const { return base_->growth.q; }

    void f_bar(ConstSpan x, double w0, ConstSpan w, Span out) const;
    double l_bar(ConstSpan x, double w0, ConstSpan w) const;

private:
    std::shared_ptr<const ControlProblem> base_;
};

/// Checks cone preconditions and wraps the problem. For q > p a missing
/// dynamics recession is filled in with the identically-zero one.
ExtendedProblem extend(ControlProblem problem);

/// Piecewise-constant control: breakpoints.size() == values.size() + 1,
/// value i active on [breakpoints[i], breakpoints[i+1]).
struct TimedControl {
    std::vector<double> breakpoints;
    std::vector<Vec> values;

    double start() const { return breakpoints.front(); }
    double end() const { return breakpoints.back(); }
    const Vec& at(double t) const;
    void validate() const;
};

struct Reparametrization {
    TimedControl control;                          // over the other time scale
    std::vector<std::pair<double, double>> time_map;  // (t, s) samples
};

/// Proposition-style forward map: s(t) = int_0^t (1+|alpha|^q),
/// w = alpha/(1+|alpha|^q)^(1/q), w0 = (1-|w|^q)^(1/q). Extended values are
/// stored as [w0, w...].
Reparametrization ordinary_to_extended(const TimedControl& alpha,
                                       const ControlProblem& problem);

/// Inverse map: t(s) = int_0^s w0^q, alpha = w/w0. Requires w0 > 0 on every
/// piece of the supplied horizon. time_map holds (t, s) samples.
Reparametrization extended_to_ordinary(const TimedControl& extended,
                                       const ControlProblem& problem);

struct GeneralizedTrajectory {
    std::vector<double> s;        // extended time samples
    std::vector<Vec> xi;          // extended trajectory
    std::vector<double> t;        // physical time t(s) at the same samples
    std::vector<Vec> y_gen;       // y_gen(t) = xi(s(t)), right inverse
    std::vector<double> t_gen;    // physical times for y_gen (strictly increasing)
    double extended_cost = 0.0;
    std::vector<std::pair<double, double>> jumps;  // (t, displacement) pairs
    bool truncated = false;
};

/// Integrates the extended system under a piecewise-constant extended control
/// and builds the generalized (possibly jumping) physical-time trajectory.
/// Intervals with w0 < 1e-12 and displacement > jump_tol count as jumps.
GeneralizedTrajectory generalized_trajectory(ConstSpan x,
                                             const TimedControl& extended,
                                             const ExtendedProblem& problem,
                                             double horizon_s,
                                             double ds = 1e-3,
                                             double jump_tol = 1e-6);

}  // namespace hjbtk
