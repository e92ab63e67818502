#include "hjbtk/certificates.hpp"

#include <cmath>
#include <sstream>

namespace hjbtk {

namespace {

constexpr int kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::size_t i, int base) {
    double r = 0.0, f = 1.0 / base;
    while (i) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f /= base;
    }
    return r;
}

Vec grad_at(const Certificate& U, ConstSpan x) {
    Vec g = U.gradient(x);
    if (!all_finite(g))
        throw EvaluationError("certificate gradient is not finite");
    return g;
}

// Shared sampling loop. margin_at(x) returns the sample margin; `worse`
// says whether its first argument is worse than the second.
template <class MarginAt, class Worse>
MarginReport sample_margins(const TargetSet& target, const SampleRegion& region,
                            std::size_t samples, unsigned seed,
                            const std::function<double(ConstSpan)>* positivity,
                            MarginAt&& margin_at, Worse&& worse,
                            double init_margin, bool pass_if(double)) {
    if (region.lo.size() != region.hi.size() || region.lo.empty())
        throw ConfigError("sample region box is malformed");
    MarginReport rep;
    rep.worst_margin = init_margin;
    std::size_t used = 0;
    for (std::size_t i = 1; used < samples; ++i) {
        const Vec x = halton_point(i + seed, region);
        if (target.membership(x)) continue;
        ++used;
        if (positivity && (*positivity)(x) <= 0.0) {
            rep.positivity_ok = false;
            rep.argmin_point = x;
        }
        const double m = margin_at(x);
        if (worse(m, rep.worst_margin)) {
            rep.worst_margin = m;
            if (rep.positivity_ok) rep.argmin_point = x;
        }
        if (i > 100 * samples) break;  // target covers (almost) everything
    }
    rep.samples = used;
    rep.pass = rep.positivity_ok && pass_if(rep.worst_margin);
    if (rep.argmin_point.empty() && used)
        rep.argmin_point = halton_point(1 + seed, region);
    return rep;
}

}  // namespace

Vec halton_point(std::size_t i, const SampleRegion& region) {
    const std::size_t n = region.lo.size();
    if (n > 8) throw ConfigError("halton sampling supports up to 8 dimensions");
    Vec x(n);
    for (std::size_t d = 0; d < n; ++d)
        x[d] = region.lo[d] +
               (region.hi[d] - region.lo[d]) * radical_inverse(i, kPrimes[d]);
    return x;
}

std::string MarginReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"worst_margin\":" << worst_margin << ",\"argmin_point\":[";
    for (std::size_t d = 0; d < argmin_point.size(); ++d)
        os << (d ? "," : "") << argmin_point[d];
    os << "],\"samples\":" << samples
       << ",\"pass\":" << (pass ? "true" : "false") << "}";
    return os.str();
}

MarginReport check_mrf(const ControlProblem& problem, const Certificate& U,
                       const TargetSet& target, double k,
                       const SampleRegion& region, const ControlMesh& mesh,
                       std::size_t samples, unsigned seed, RateFn radius_map) {
    if (mesh.extended)
        throw ConfigError("check_mrf works on the ordinary control mesh");
    mesh.require_nonempty();
    Vec vel(problem.n);
    auto margin_at = [&](ConstSpan x) {
        const Vec g = grad_at(U, x);
        const double radius =
            radius_map ? radius_map(U.value(x)) : kInfiniteValue;
        double best = kInfiniteValue;
        for (const Vec& a : mesh.points) {
            if (norm2(a) > radius) continue;
            problem.f(x, a, vel);
            best = std::min(best, dot(g, vel) + k * problem.l(x, a));
        }
        return best;
    };
    return sample_margins(
        target, region, samples, seed, &U.value, margin_at,
        [](double a, double b) { return a > b; },
        -kInfiniteValue, [](double w) { return w < 0.0; });
}

MarginReport check_sc1(const ExtendedProblem& ext, const Certificate& U,
                       const TargetSet& target, const RateFn& m,
                       const SampleRegion& region, const ControlMesh& mesh,
                       std::size_t samples, unsigned seed) {
    if (!mesh.extended) throw ConfigError("check_sc1 needs an S(A) mesh");
    mesh.require_nonempty();
    Vec vel(ext.n());
    auto margin_at = [&](ConstSpan x) {
        const Vec g = grad_at(U, x);
        double worst = -kInfiniteValue;
        for (const Vec& pt : mesh.points) {
            ConstSpan w(pt.data() + 1, pt.size() - 1);
            ext.f_bar(x, pt[0], w, vel);
            worst = std::max(worst, dot(g, vel));
        }
        return worst + m(target.distance(x));
    };
    return sample_margins(
        target, region, samples, seed, &U.value, margin_at,
        [](double a, double b) { return a > b; },
        -kInfiniteValue, [](double w) { return w <= 0.0; });
}

MarginReport check_sc2(const ControlProblem& problem, const TargetSet& target,
                       const RateFn& c1, const SampleRegion& region,
                       const ControlMesh& mesh, std::size_t samples,
                       unsigned seed) {
    mesh.require_nonempty();
    std::optional<ExtendedProblem> ext;
    if (mesh.extended) ext.emplace(extend(problem));
    auto margin_at = [&](ConstSpan x) {
        double best = kInfiniteValue;
        for (const Vec& pt : mesh.points) {
            double lv;
            if (ext) {
                ConstSpan w(pt.data() + 1, pt.size() - 1);
                lv = ext->l_bar(x, pt[0], w);
            } else {
                lv = problem.l(x, pt);
            }
            best = std::min(best, lv - c1(target.distance(x)));
        }
        return best;
    };
    return sample_margins(
        target, region, samples, seed, nullptr, margin_at,
        [](double a, double b) { return a < b; },
        kInfiniteValue, [](double w) { return w >= 0.0; });
}

ProbeReport probe_h3(const ControlProblem& problem, const ControlMesh& mesh,
                     const ValueField* field, ConstSpan x,
                     const TargetSet& target, double s_budget,
                     const ProbeOptions& options) {
    if (!field)
        throw PreconditionError("probe_h3 needs a solved value field");
    SchemeModel model = SchemeModel::for_problem(problem, mesh);

    ProbeReport rep;
    Vec y(x.begin(), x.end());
    rep.min_distance = target.distance(y);
    rep.s_at_min = 0.0;
    rep.trace.emplace_back(0.0, rep.min_distance);

    Vec vel(model.n), dest(model.n), best_dest(model.n);
    const double dt = options.dt;
    for (double s = 0.0; s < s_budget; s += dt) {
        double best = kInfiniteValue;
        for (std::size_t k = 0; k < model.mesh->size(); ++k) {
            double cost, w0q;
            model.eval(y, k, vel, cost, w0q);
            for (int d = 0; d < model.n; ++d) dest[d] = y[d] + dt * vel[d];
            const double uv = interpolate_clamped(*field, dest);
            double cand;
            if (options.kruzkov) {
                const double g = std::exp(-dt * cost);
                cand = (1.0 - g) + g * uv;
            } else {
                cand = dt * cost +
                       std::exp(-options.delta * dt * w0q) * uv;
            }
            if (cand < best) {
                best = cand;
                best_dest = dest;
            }
        }
        y = best_dest;
        const double d = target.distance(y);
        rep.trace.emplace_back(s + dt, d);
        if (d < rep.min_distance) {
            rep.min_distance = d;
            rep.s_at_min = s + dt;
        }
    }
    rep.reached = rep.min_distance <= options.tol;
    return rep;
}

}  // namespace hjbtk
