#include "hjbtk/trajectories.hpp"

#include <algorithm>
#include <cmath>

#include "hjbtk/fields.hpp"

namespace hjbtk {

namespace {

constexpr double kBlowUp = 1e12;

}  // namespace

Trajectory integrate(const ControlProblem& problem, ConstSpan x,
                     const TimedControl& alpha, double T, double dt) {
    if (!(dt > 0.0)) throw DomainError("integrate: dt must be positive");
    alpha.validate();
    if (alpha.breakpoints.back() < T - 1e-12)
        throw DomainError("integrate: control not defined on all of [0,T]");

    const int n = problem.n;
    const double M = problem.growth.M;
    const double p = static_cast<double>(problem.growth.p);

    Trajectory out;
    Vec y(x.begin(), x.end());
    double cost = 0.0;
    double ctrl_integral = 0.0;  // integral of |alpha|^p
    out.times.push_back(0.0);
    out.states.push_back(y);
    out.payoff.push_back(0.0);

    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = 0.0;
    while (t < T - 1e-15) {
        // steps never straddle a control breakpoint: one piece per step
        double h = std::min(dt, T - t);
        for (double b : alpha.breakpoints)
            if (b > t + 1e-15 && b < t + h - 1e-15) h = b - t;
        const Vec a = alpha.at(std::min(t, T - 1e-15));

        auto rhs = [&](const Vec& yy, Vec& k) { problem.f(yy, a, k); };
        rhs(y, k1);
        for (int d = 0; d < n; ++d) tmp[d] = y[d] + 0.5 * h * k1[d];
        rhs(tmp, k2);
        for (int d = 0; d < n; ++d) tmp[d] = y[d] + 0.5 * h * k2[d];
        rhs(tmp, k3);
        for (int d = 0; d < n; ++d) tmp[d] = y[d] + h * k3[d];
        rhs(tmp, k4);

        // running cost by Simpson on the same stages
        const double l1 = problem.l(y, a);
        for (int d = 0; d < n; ++d) tmp[d] = y[d] + 0.5 * h * k1[d];
        const double lm = problem.l(tmp, a);
        for (int d = 0; d < n; ++d)
            tmp[d] = y[d] + (h / 6.0) * (k1[d] + 2 * k2[d] + 2 * k3[d] + k4[d]);
        const double l2 = problem.l(tmp, a);
        cost += (h / 6.0) * (l1 + 4.0 * lm + l2);
        y = tmp;

        ctrl_integral += h * std::pow(norm2(a), p);
        t += h;
        out.times.push_back(t);
        out.states.push_back(y);
        out.payoff.push_back(cost);

        if (norm2(y) > kBlowUp) {
            out.blew_up = true;
            out.truncation_time = t + h;
            break;
        }
        if (M > 0.0) {
            const double bound = (norm2(Vec(x.begin(), x.end())) + M * (t + h) +
                                  M * ctrl_integral) *
                                 std::exp(M * ((t + h) + ctrl_integral));
            const double ratio = norm2(y) / std::max(bound, 1e-300);
            out.worst_bound_ratio = std::max(out.worst_bound_ratio, ratio);
            if (ratio > 1.0 + 1e-9) out.bound_satisfied = false;
        }
    }
    return out;
}

TimedControl chattering_control(int n, double t) {
    if (n < 1) throw DomainError("chattering_control: need n >= 1");
    if (!(t > 0.0)) throw DomainError("chattering_control: need t > 0");
    TimedControl c;
    const double h = t / n;
    for (int i = 0; i <= n; ++i) c.breakpoints.push_back(i * h);
    for (int i = 0; i < n; ++i) c.values.push_back({i % 2 == 0 ? 1.0 : -1.0});
    return c;
}

namespace {

struct BruteForce {
    const ControlProblem* problem = nullptr;
    const ExtendedProblem* ext = nullptr;  // set when mesh is extended
    const ControlMesh* mesh = nullptr;
    double dt = 0.0;
    const BruteForceOptions* options = nullptr;

    double step_cost(const Vec& y, std::size_t k, Vec& dest) const {
        const Vec& pt = mesh->points[k];
        double cost;
        if (ext) {
            ConstSpan w(pt.data() + 1, pt.size() - 1);
            ext->f_bar(y, pt[0], w, dest);
            cost = ext->l_bar(y, pt[0], w);
        } else {
            problem->f(y, pt, dest);
            cost = problem->l(y, pt);
        }
        for (std::size_t d = 0; d < y.size(); ++d) {
            dest[d] = y[d] + dt * dest[d];
            if (options->clamp_box)
                dest[d] = std::clamp(dest[d], options->clamp_box->first[d],
                                     options->clamp_box->second[d]);
        }
        return dt * cost;
    }

    double best(const Vec& y, int remaining) const {
        if (remaining == 0) return 0.0;
        double b = kInfiniteValue;
        Vec dest(y.size());
        for (std::size_t k = 0; k < mesh->size(); ++k) {
            const double c = step_cost(y, k, dest);
            b = std::min(b, c + best(dest, remaining - 1));
        }
        return b;
    }
};

}  // namespace

double brute_force_value(const ControlProblem& problem, ConstSpan x,
                         const ControlMesh& mesh, int steps, double dt,
                         const BruteForceOptions& options) {
    mesh.require_nonempty();
    if (steps < 0) throw DomainError("brute_force_value: negative step count");
    const double budget =
        std::pow(static_cast<double>(mesh.size()), static_cast<double>(steps));
    if (budget > 1e7)
        throw PreconditionError("brute_force_value: enumeration needs " +
                                std::to_string(budget) +
                                " sequences, budget is 1e7");
    std::optional<ExtendedProblem> ext;
    if (mesh.extended) ext.emplace(extend(problem));
    BruteForce bf{&problem, ext ? &*ext : nullptr, &mesh, dt, &options};
    return bf.best(Vec(x.begin(), x.end()), steps);
}

}  // namespace hjbtk
