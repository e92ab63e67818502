#include "hjbtk/extension.hpp"

#include <algorithm>
#include <cmath>

namespace hjbtk {

double ExtendedControlPoint::defect(int q) const {
    double s = std::pow(std::abs(w0), q);
    s += std::pow(norm2(w), q);
    return std::abs(s - 1.0);
}

ExtendedControlPoint extended_point(ConstSpan dir, double r, int q) {
    ExtendedControlPoint p;
    p.w.assign(dir.begin(), dir.end());
    for (double& v : p.w) v *= r;
    p.w0 = (r >= 1.0) ? 0.0 : std::pow(1.0 - std::pow(r, q), 1.0 / q);
    if (r <= 0.0) {
        std::fill(p.w.begin(), p.w.end(), 0.0);
        p.w0 = 1.0;
    }
    return p;
}

ExtendedProblem::ExtendedProblem(ControlProblem base)
    : base_(std::make_shared<const ControlProblem>(std::move(base))) {}

void ExtendedProblem::f_bar(ConstSpan x, double w0, ConstSpan w, Span out) const {
    if (w0 > 0.0) {
        Vec a(w.begin(), w.end());
        for (double& v : a) v /= w0;
        base_->f(x, a, out);
        const double s = std::pow(w0, base_->growth.q);
        for (double& v : out) v *= s;
        return;
    }
    if (base_->f_recession) {
        (*base_->f_recession)(x, w, out);
        return;
    }
    Vec r = recession(*base_, Recession::Dynamics, x, w);
    std::copy(r.begin(), r.end(), out.begin());
}

double ExtendedProblem::l_bar(ConstSpan x, double w0, ConstSpan w) const {
    if (w0 > 0.0) {
        Vec a(w.begin(), w.end());
        for (double& v : a) v /= w0;
        return std::pow(w0, base_->growth.q) * base_->l(x, a);
    }
    if (base_->l_recession) return (*base_->l_recession)(x, w);
    return recession(*base_, Recession::Lagrangian, x, w)[0];
}

ExtendedProblem extend(ControlProblem problem) {
    if (problem.control_set.compact())
        throw PreconditionError("extend requires a cone control set");
    if (problem.growth.q > problem.growth.p && !problem.f_recession) {
        // q > p forces a zero dynamics recession.
        problem.f_recession = [](ConstSpan, ConstSpan, Span out) {
            std::fill(out.begin(), out.end(), 0.0);
        };
    }
    return ExtendedProblem(std::move(problem));
}

const Vec& TimedControl::at(double t) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    std::size_t i = (it == breakpoints.begin())
                        ? 0
                        : static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    if (i >= values.size()) i = values.size() - 1;
    return values[i];
}

void TimedControl::validate() const {
    if (breakpoints.size() != values.size() + 1)
        throw ConfigError("TimedControl: breakpoints must outnumber values by one");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw ConfigError("TimedControl: breakpoints must be strictly increasing");
}

Reparametrization ordinary_to_extended(const TimedControl& alpha,
                                       const ControlProblem& problem) {
    alpha.validate();
    const int q = problem.growth.q;
    Reparametrization out;
    out.control.breakpoints.push_back(0.0);
    out.time_map.emplace_back(alpha.breakpoints.front(), 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < alpha.values.size(); ++i) {
        const Vec& c = alpha.values[i];
        if (!problem.control_set.contains(c))
            throw DomainError("control value outside A");
        const double rate = 1.0 + std::pow(norm2(c), q);
        const double dt = alpha.breakpoints[i + 1] - alpha.breakpoints[i];
        s += rate * dt;
        Vec v(1 + c.size());
        const double scale = std::pow(rate, -1.0 / q);
        for (std::size_t j = 0; j < c.size(); ++j) v[1 + j] = c[j] * scale;
        // 1 - |w|^q = 1/rate exactly, so w0 = rate^(-1/q).
        v[0] = scale;
        out.control.values.push_back(std::move(v));
        out.control.breakpoints.push_back(s);
        out.time_map.emplace_back(alpha.breakpoints[i + 1], s);
    }
    return out;
}

Reparametrization extended_to_ordinary(const TimedControl& extended,
                                       const ControlProblem& problem) {
    extended.validate();
    const int q = problem.growth.q;
    Reparametrization out;
    out.control.breakpoints.push_back(0.0);
    out.time_map.emplace_back(0.0, extended.breakpoints.front());
    double t = 0.0;
    for (std::size_t i = 0; i < extended.values.size(); ++i) {
        const Vec& v = extended.values[i];
        const double w0 = v[0];
        if (!(w0 > 0.0))
            throw NonInvertibleTime(
                "w0 vanishes on an interval; the time change has no inverse there");
        const double ds = extended.breakpoints[i + 1] - extended.breakpoints[i];
        t += std::pow(w0, q) * ds;
        Vec a(v.begin() + 1, v.end());
        for (double& c : a) c /= w0;
        out.control.values.push_back(std::move(a));
        out.control.breakpoints.push_back(t);
        out.time_map.emplace_back(t, extended.breakpoints[i + 1]);
    }
    if (!(t > 0.0))
        throw NonInvertibleTime("time change is identically zero on the horizon");
    return out;
}

namespace {

// RK4 step for the extended system with constant (w0,w); the cost rides along.
void rk4_ext_step(const ExtendedProblem& ep, Vec& xi, double& cost, double w0,
                  ConstSpan w, double h) {
    const int n = ep.n();
    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto lbar = [&](ConstSpan x) { return ep.l_bar(x, w0, w); };
    ep.f_bar(xi, w0, w, k1);
    double c1 = lbar(xi);
    for (int i = 0; i < n; ++i) tmp[i] = xi[i] + 0.5 * h * k1[i];
    ep.f_bar(tmp, w0, w, k2);
    double c2 = lbar(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = xi[i] + 0.5 * h * k2[i];
    ep.f_bar(tmp, w0, w, k3);
    double c3 = lbar(tmp);
    for (int i = 0; i < n; ++i) tmp[i] = xi[i] + h * k3[i];
    ep.f_bar(tmp, w0, w, k4);
    double c4 = lbar(tmp);
    for (int i = 0; i < n; ++i)
        xi[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    cost += h / 6.0 * (c1 + 2 * c2 + 2 * c3 + c4);
}

}  // namespace

GeneralizedTrajectory generalized_trajectory(ConstSpan x,
                                             const TimedControl& extended,
                                             const ExtendedProblem& problem,
                                             double horizon_s, double ds,
                                             double jump_tol) {
    extended.validate();
    const int q = problem.q();
    GeneralizedTrajectory out;
    Vec xi(x.begin(), x.end());
    double s = extended.breakpoints.front();
    double t = 0.0;
    out.s.push_back(s);
    out.xi.push_back(xi);
    out.t.push_back(t);

    const double s_end = std::min(horizon_s, 1e18);
    std::size_t piece = 0;
    while (s < s_end - 1e-15) {
        // Clamp to piece boundaries; the last piece extends to the horizon.
        double piece_end = s_end;
        while (piece + 1 < extended.values.size() &&
               s >= extended.breakpoints[piece + 1] - 1e-15)
            ++piece;
        if (piece + 1 < extended.breakpoints.size())
            piece_end = std::min(piece_end, extended.breakpoints[piece + 1]);
        if (piece_end <= s + 1e-15) {
            piece_end = s_end;
        }
        const Vec& v = extended.values[std::min(piece, extended.values.size() - 1)];
        const double w0 = v[0];
        Vec w(v.begin() + 1, v.end());
        const double piece_start_s = s;
        const Vec piece_start_xi = xi;
        while (s < piece_end - 1e-15) {
            const double h = std::min(ds, piece_end - s);
            rk4_ext_step(problem, xi, out.extended_cost, w0, w, h);
            s += h;
            t += std::pow(w0, q) * h;
            out.s.push_back(s);
            out.xi.push_back(xi);
            out.t.push_back(t);
            if (norm2(xi) > 1e12) {
                out.truncated = true;
                break;
            }
        }
        if (w0 < 1e-12) {
            double disp = 0.0;
            for (int i = 0; i < problem.n(); ++i)
                disp = std::max(disp, std::abs(xi[i] - piece_start_xi[i]));
            if (disp > jump_tol) out.jumps.emplace_back(t, disp);
        }
        (void)piece_start_s;
        if (out.truncated) break;
    }

    // Physical-time trajectory: right inverse of t(s) -> keep the last sample
    // of every run of (numerically) equal t.
    for (std::size_t i = 0; i < out.t.size(); ++i) {
        if (i + 1 < out.t.size() && out.t[i + 1] <= out.t[i] + 1e-15) continue;
        out.t_gen.push_back(out.t[i]);
        out.y_gen.push_back(out.xi[i]);
    }
    return out;
}

}  // namespace hjbtk
