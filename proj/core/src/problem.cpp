#include "hjbtk/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hjbtk {

bool ControlSetDescriptor::contains(ConstSpan a, double tol) const {
    if (static_cast<int>(a.size()) != m) return false;
    switch (kind) {
        case ControlSetKind::CompactBox:
            for (int i = 0; i < m; ++i)
                if (a[i] < bounds[i].first - tol || a[i] > bounds[i].second + tol)
                    return false;
            return true;
        case ControlSetKind::CompactFinite:
            for (const Vec& p : points) {
                double d = 0.0;
                for (int i = 0; i < m; ++i) d = std::max(d, std::abs(a[i] - p[i]));
                if (d <= tol) return true;
            }
            return false;
        case ControlSetKind::Cone:
            return !cone_membership || cone_membership(a);
    }
    return false;
}

ControlSetDescriptor ControlSetDescriptor::box(
    std::vector<std::pair<double, double>> b) {
    ControlSetDescriptor d;
    d.kind = ControlSetKind::CompactBox;
    d.m = static_cast<int>(b.size());
    for (auto& [lo, hi] : b)
        if (!(lo <= hi)) throw ConfigError("control box has empty interval");
    d.bounds = std::move(b);
    return d;
}

ControlSetDescriptor ControlSetDescriptor::finite(std::vector<Vec> pts) {
    if (pts.empty()) throw ConfigError("finite control set is empty");
    ControlSetDescriptor d;
    d.kind = ControlSetKind::CompactFinite;
    d.m = static_cast<int>(pts.front().size());
    d.points = std::move(pts);
    return d;
}

ControlSetDescriptor ControlSetDescriptor::full_cone(int m) {
    ControlSetDescriptor d;
    d.kind = ControlSetKind::Cone;
    d.m = m;
    d.cone_membership = [](ConstSpan) { return true; };
    d.cone_description = "R^m";
    return d;
}

void GrowthData::validate(bool cone) const {
    if (p < 1 || q < p) throw ConfigError("growth exponents require q >= p >= 1");
    if (M <= 0) throw ConfigError("growth constant M must be positive");
    if (cone && C2 <= 0)
        throw ConfigError("coercivity constant C2 must be positive for cone control sets");
}

namespace {

std::string point_str(ConstSpan v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
    return os.str();
}

}  // namespace

Vec eval_dynamics(const ControlProblem& problem, ConstSpan x, ConstSpan a) {
    if (!problem.control_set.contains(a))
        throw DomainError("control " + point_str(a) + " is outside the control set");
    Vec out(problem.n, 0.0);
    problem.f(x, a, out);
    if (!all_finite(out))
        throw EvaluationError("dynamics non-finite at x=" + point_str(x) +
                              " a=" + point_str(a));
    return out;
}

double eval_lagrangian(const ControlProblem& problem, ConstSpan x, ConstSpan a) {
    if (!problem.control_set.contains(a))
        throw DomainError("control " + point_str(a) + " is outside the control set");
    double v = problem.l(x, a);
    if (!std::isfinite(v))
        throw EvaluationError("lagrangian non-finite at x=" + point_str(x) +
                              " a=" + point_str(a));
    if (v < 0.0)
        throw ModelViolation("lagrangian negative (" + std::to_string(v) +
                             ") at x=" + point_str(x) + " a=" + point_str(a));
    return v;
}

namespace {

// One scaled evaluation rho^q Phi(x, a/rho).
Vec scaled_eval(const ControlProblem& problem, Recession which, ConstSpan x,
                ConstSpan a, double rho) {
    const double s = std::pow(rho, problem.growth.q);
    Vec ar(a.begin(), a.end());
    for (double& v : ar) v /= rho;
    if (which == Recession::Dynamics) {
        Vec out(problem.n, 0.0);
        problem.f(x, ar, out);
        for (double& v : out) v *= s;
        return out;
    }
    return {s * problem.l(x, ar)};
}

}  // namespace

Vec recession(const ControlProblem& problem, Recession which, ConstSpan x,
              ConstSpan a) {
    if (problem.control_set.compact())
        throw PreconditionError("recession requires a cone control set");
    if (which == Recession::Dynamics && problem.f_recession) {
        Vec out(problem.n, 0.0);
        (*problem.f_recession)(x, a, out);
        return out;
    }
    if (which == Recession::Lagrangian && problem.l_recession)
        return {(*problem.l_recession)(x, a)};

    // Geometric extrapolation rho_k = 2^-k, k = 4..20; the limit is assumed
    // to exist but no closed form is available.  Convergence is typically
    // linear in rho, so accelerate with Aitken delta^2; acceleration is only
    // trusted while the raw differences contract, which keeps genuinely
    // oscillating sequences from producing a bogus limit.
    Vec prev2, prev, cur, ait_prev;
    for (int k = 4; k <= 20; ++k) {
        cur = scaled_eval(problem, which, x, a, std::pow(2.0, -k));
        if (!all_finite(cur))
            throw RecessionUndefined("scaled evaluation non-finite at rho=2^-" +
                                     std::to_string(k));
        if (!prev.empty()) {
            double diff = 0.0, scale = 1.0;
            for (std::size_t i = 0; i < cur.size(); ++i) {
                diff = std::max(diff, std::abs(cur[i] - prev[i]));
                scale = std::max(scale, std::abs(cur[i]));
            }
            if (diff <= 1e-9 * scale) return cur;
            if (!prev2.empty()) {
                double dprev = 0.0;
                for (std::size_t i = 0; i < cur.size(); ++i)
                    dprev = std::max(dprev, std::abs(prev[i] - prev2[i]));
                if (diff <= 0.9 * dprev) {
                    Vec ait(cur.size());
                    for (std::size_t i = 0; i < cur.size(); ++i) {
                        const double d = cur[i] - prev[i];
                        const double den = cur[i] - 2.0 * prev[i] + prev2[i];
                        ait[i] = std::abs(den) > 1e-300 ? cur[i] - d * d / den
                                                        : cur[i];
                    }
                    if (!ait_prev.empty()) {
                        double adiff = 0.0;
                        for (std::size_t i = 0; i < cur.size(); ++i)
                            adiff = std::max(adiff,
                                             std::abs(ait[i] - ait_prev[i]));
                        if (adiff <= 1e-9 * scale) return ait;
                    }
                    ait_prev = std::move(ait);
                } else {
                    ait_prev.clear();
                }
            }
        }
        prev2 = prev;
        prev = cur;
    }
    throw RecessionUndefined("recession extrapolation did not settle at x=" +
                             point_str(x) + " a=" + point_str(a));
}

CoercivityReport check_coercivity(const ControlProblem& problem,
                                  const std::vector<std::pair<double, double>>& x_box,
                                  const std::vector<Vec>& controls,
                                  int sample_budget, unsigned seed) {
    if (problem.control_set.compact())
        throw PreconditionError("check_coercivity requires a cone control set");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CoercivityReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const auto& g = problem.growth;
    for (int s = 0; s < sample_budget; ++s) {
        Vec x(problem.n);
        for (int i = 0; i < problem.n; ++i) {
            const auto& [lo, hi] = x_box[i % x_box.size()];
            x[i] = lo + (hi - lo) * unit(rng);
        }
        const Vec& a = controls[s % controls.size()];
        double margin = problem.l(x, a) -
                        g.C2 * std::pow(norm2(a), g.q) + g.C1;
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.worst_x = x;
            rep.worst_a = a;
        }
        ++rep.samples;
    }
    return rep;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key,
             double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

ControlProblem make_example_3_3() {
    ControlProblem pr;
    pr.name = "example-3-3";
    pr.n = 2;
    pr.control_set = ControlSetDescriptor::full_cone(1);
    pr.growth = {.p = 1, .q = 1, .M = 2.0, .C1 = 0.0, .C2 = 1.0};
    pr.f = [](ConstSpan x, ConstSpan a, Span out) {
        out[0] = a[0];
        out[1] = std::abs(x[0]) + std::abs(x[1]);
    };
    pr.l = [](ConstSpan x, ConstSpan a) {
        return x[0] * x[0] + x[1] * x[1] + std::abs(a[0]);
    };
    pr.f_recession = [](ConstSpan, ConstSpan a, Span out) {
        out[0] = a[0];
        out[1] = 0.0;
    };
    pr.l_recession = [](ConstSpan, ConstSpan a) { return std::abs(a[0]); };
    return pr;
}

ControlProblem make_example_4_1() {
    ControlProblem pr;
    pr.name = "example-4-1";
    pr.n = 2;
    pr.control_set = ControlSetDescriptor::finite({{-1.0}, {1.0}});
    pr.growth = {.p = 1, .q = 1, .M = 2.0};
    pr.f = [](ConstSpan x, ConstSpan a, Span out) {
        out[0] = a[0];
        out[1] = std::abs(x[0]);
    };
    pr.l = [](ConstSpan x, ConstSpan) {
        return x[0] * x[0] + x[1] * x[1];
    };
    return pr;
}

ControlProblem make_lqr_1d(double Q, double R) {
    ControlProblem pr;
    pr.name = "lqr-1d";
    pr.n = 1;
    pr.control_set = ControlSetDescriptor::full_cone(1);
    pr.growth = {.p = 1, .q = 2, .M = 2.0, .C1 = 0.0, .C2 = R};
    pr.f = [](ConstSpan, ConstSpan a, Span out) { out[0] = a[0]; };
    pr.l = [Q, R](ConstSpan x, ConstSpan a) {
        return Q * x[0] * x[0] + R * a[0] * a[0];
    };
    pr.f_recession = [](ConstSpan, ConstSpan, Span out) { out[0] = 0.0; };
    pr.l_recession = [R](ConstSpan, ConstSpan a) { return R * a[0] * a[0]; };
    TargetSet t;
    t.membership = [](ConstSpan x) { return std::abs(x[0]) <= 1e-12; };
    t.distance = [](ConstSpan x) { return std::abs(x[0]); };
    t.bounding_radius = 0.0;
    pr.target = t;
    return pr;
}

ControlProblem make_lqr_nd(int n, double Q, double R) {
    ControlProblem pr;
    pr.name = "lqr-nd";
    pr.n = n;
    pr.control_set = ControlSetDescriptor::full_cone(n);
    pr.growth = {.p = 1, .q = 2, .M = 2.0, .C1 = 0.0, .C2 = R};
    pr.f = [](ConstSpan, ConstSpan a, Span out) {
        std::copy(a.begin(), a.end(), out.begin());
    };
    pr.l = [Q, R](ConstSpan x, ConstSpan a) {
        return Q * dot(x, x) + R * dot(a, a);
    };
    pr.f_recession = [](ConstSpan, ConstSpan, Span out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    pr.l_recession = [R](ConstSpan, ConstSpan a) { return R * dot(a, a); };
    TargetSet t;
    t.membership = [](ConstSpan x) { return norm2(x) <= 1e-12; };
    t.distance = [](ConstSpan x) { return norm2(x); };
    t.bounding_radius = 0.0;
    pr.target = t;
    return pr;
}

ControlProblem make_ergodic_torus_1d() {
    ControlProblem pr;
    pr.name = "ergodic-torus-1d";
    pr.n = 1;
    pr.control_set = ControlSetDescriptor::full_cone(1);
    pr.growth = {.p = 1, .q = 2, .M = 3.0, .C1 = 0.0, .C2 = 1.0};
    pr.f = [](ConstSpan, ConstSpan a, Span out) { out[0] = a[0]; };
    pr.l = [](ConstSpan x, ConstSpan a) {
        return 2.0 + std::sin(x[0]) + a[0] * a[0];
    };
    pr.f_recession = [](ConstSpan, ConstSpan, Span out) { out[0] = 0.0; };
    pr.l_recession = [](ConstSpan, ConstSpan a) { return a[0] * a[0]; };
    return pr;
}

}  // namespace

ControlProblem builtin(const std::string& name,
                       const std::map<std::string, double>& params) {
    ControlProblem pr;
    if (name == "example-3-3") pr = make_example_3_3();
    else if (name == "example-4-1") pr = make_example_4_1();
    else if (name == "lqr-1d")
        pr = make_lqr_1d(param(params, "Q", 1.0), param(params, "R", 1.0));
    else if (name == "lqr-nd")
        pr = make_lqr_nd(static_cast<int>(param(params, "n", 2.0)),
                         param(params, "Q", 1.0), param(params, "R", 1.0));
    else if (name == "ergodic-torus-1d") pr = make_ergodic_torus_1d();
    else throw LookupError("unknown builtin problem '" + name + "'");
    pr.growth.validate(!pr.control_set.compact());
    return pr;
}

}  // namespace hjbtk
