#include "hjbtk/solvers.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace hjbtk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const ControlMesh& require_mesh(const SolverConfig& config) {
    if (!config.mesh) throw ConfigError("solver config needs a control mesh");
    return *config.mesh;
}

// Chunked parallel loop; f(begin, end) must be safe to run concurrently on
// disjoint ranges.
template <class F>
void parallel_ranges(std::size_t n, int threads, F&& f) {
    if (threads <= 1 || n < 2048) {
        f(std::size_t{0}, n);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = 512;
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(chunk);
            if (b >= n) return;
            f(b, std::min(b + chunk, n));
        }
    };
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
}

}  // namespace

SchemeModel SchemeModel::compact(const ControlProblem& problem,
                                 const ControlMesh& mesh) {
    if (mesh.extended)
        throw ConfigError("compact scheme model needs an A mesh");
    mesh.require_nonempty();
    SchemeModel m;
    m.n = problem.n;
    m.extended = false;
    m.mesh = &mesh;
    m.eval = [&problem, &mesh](ConstSpan x, std::size_t k, Span vel,
                               double& cost, double& w0q) {
        const Vec& a = mesh.points[k];
        problem.f(x, a, vel);
        cost = problem.l(x, a);
        w0q = 1.0;
    };
    return m;
}

SchemeModel SchemeModel::extended_model(const ExtendedProblem& ext,
                                        const ControlMesh& mesh) {
    if (!mesh.extended)
        throw ConfigError("extended scheme model needs an S(A) mesh");
    mesh.require_nonempty();
    SchemeModel m;
    m.n = ext.n();
    m.extended = true;
    m.mesh = &mesh;
    const int q = ext.q();
    // The wrapped ExtendedProblem shares ownership of the base problem, so a
    // copy here keeps the model self-contained.
    m.eval = [ext, &mesh, q](ConstSpan x, std::size_t k, Span vel, double& cost,
                             double& w0q) {
        const Vec& pt = mesh.points[k];
        ConstSpan w(pt.data() + 1, pt.size() - 1);
        ext.f_bar(x, pt[0], w, vel);
        cost = ext.l_bar(x, pt[0], w);
        w0q = std::pow(pt[0], q);
    };
    return m;
}

SchemeModel SchemeModel::for_problem(const ControlProblem& problem,
                                     const ControlMesh& mesh) {
    if (problem.control_set.compact()) return compact(problem, mesh);
    return extended_model(extend(problem), mesh);
}

ValueField sl_step(const SchemeModel& model, const ValueField& u, double dt,
                   double delta, bool kruzkov,
                   const std::vector<char>* target_mask, int threads,
                   std::size_t* clamps, std::vector<std::size_t>* argmin) {
    const Grid& grid = u.grid;
    ValueField out(grid);
    if (argmin) argmin->assign(u.size(), 0);
    std::atomic<std::size_t> clamp_total{0};
    const std::size_t n_mesh = model.mesh->size();

    parallel_ranges(u.size(), threads, [&](std::size_t b, std::size_t e) {
        Vec vel(model.n), dest(model.n);
        std::size_t local_clamps = 0;
        for (std::size_t i = b; i < e; ++i) {
            if (target_mask && (*target_mask)[i]) {
                out.values[i] = 0.0;
                continue;
            }
            const Vec x = grid.coords(i);
            double best = kInfiniteValue;
            std::size_t best_k = 0;
            for (std::size_t k = 0; k < n_mesh; ++k) {
                double cost = 0.0, w0q = 1.0;
                model.eval(x, k, vel, cost, w0q);
                for (int d = 0; d < model.n; ++d) dest[d] = x[d] + dt * vel[d];
                const double uv = interpolate_clamped(u, dest, &local_clamps);
                double cand;
                if (kruzkov) {
                    const double g = std::exp(-dt * cost);
                    cand = (1.0 - g) + g * uv;
                } else if (delta > 0.0) {
                    cand = dt * cost + std::exp(-delta * dt * w0q) * uv;
                } else {
                    cand = dt * cost + uv;
                }
                if (cand < best) {
                    best = cand;
                    best_k = k;
                }
            }
            out.values[i] = best;
            if (argmin) (*argmin)[i] = best_k;
        }
        clamp_total += local_clamps;
    });
    if (clamps) *clamps += clamp_total.load();
    return out;
}

namespace {

// Max |f| over all nodes and mesh points; used only for the CFL report.
double max_speed(const SchemeModel& model, const Grid& grid) {
    double vmax = 0.0;
    Vec vel(model.n);
    const std::size_t stride = std::max<std::size_t>(1, grid.node_count() / 512);
    for (std::size_t i = 0; i < grid.node_count(); i += stride) {
        const Vec x = grid.coords(i);
        for (std::size_t k = 0; k < model.mesh->size(); ++k) {
            double cost, w0q;
            model.eval(x, k, vel, cost, w0q);
            vmax = std::max(vmax, norm_inf(vel));
        }
    }
    return vmax;
}

double sup_change_finite(const ValueField& a, const ValueField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (is_infinite_value(a.values[i]) || is_infinite_value(b.values[i]))
            continue;
        s = std::max(s, std::abs(a.values[i] - b.values[i]));
    }
    return s;
}

}  // namespace

std::string ConvergenceReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"records\":[";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        os << (i ? "," : "") << "{\"param\":" << r.parameter
           << ",\"sup_change\":" << r.sup_change << ",\"residual\":" << r.residual
           << ",\"seconds\":" << r.seconds << "}";
    }
    os << "],\"verdict\":\"";
    switch (verdict) {
        case Verdict::Converged: os << "converged"; break;
        case Verdict::BudgetExhausted: os << "budget-exhausted"; break;
        case Verdict::Diverged: os << "diverged"; break;
    }
    os << "\",\"cfl_warning\":" << (cfl_warning ? "true" : "false")
       << ",\"boundary_clamps\":" << boundary_clamps
       << ",\"provisional_nodes\":" << provisional_nodes << "}";
    return os.str();
}

FiniteHorizonResult solve_finite_horizon(const ControlProblem& problem,
                                         const Grid& grid,
                                         const SolverConfig& config, double T,
                                         std::vector<double> snapshot_times) {
    const auto t0 = Clock::now();
    SchemeModel model = SchemeModel::for_problem(problem, require_mesh(config));
    FiniteHorizonResult res{.snapshots = {},
                            .snapshot_times = snapshot_times,
                            .final_field = ValueField(grid),
                            .credit = ValueField(grid),
                            .report = {}};
    for (std::size_t j = 0; j < snapshot_times.size(); ++j)
        res.snapshots.emplace_back(grid);

    res.report.cfl_warning =
        config.dt * max_speed(model, grid) > grid.max_spacing() + 1e-15;

    ValueField u(grid), credit(grid);
    std::vector<std::size_t> argmin;
    std::vector<char> snap_done(snapshot_times.size() *
                                    (snapshot_times.empty() ? 0 : u.size()),
                                0);
    Vec vel(model.n), dest(model.n);

    int step = 0;
    for (; step < config.max_iterations; ++step) {
        // Done when every node has accumulated T of physical time.
        double min_credit = kInfiniteValue;
        for (double c : credit.values) min_credit = std::min(min_credit, c);
        if (min_credit >= T - 1e-12) break;
        if (!model.extended && step * config.dt >= T - 1e-12) break;

        ValueField next = sl_step(model, u, config.dt, 0.0, false, nullptr,
                                  config.threads, &res.report.boundary_clamps,
                                  &argmin);
        // Physical-time credit of the minimizing control.
        ValueField next_credit(grid);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const Vec x = grid.coords(i);
            double cost, w0q;
            model.eval(x, argmin[i], vel, cost, w0q);
            for (int d = 0; d < model.n; ++d) dest[d] = x[d] + config.dt * vel[d];
            next_credit.values[i] =
                config.dt * w0q + interpolate_clamped(credit, dest);
        }
        // Capture snapshots whose physical time was crossed this step.
        for (std::size_t j = 0; j < snapshot_times.size(); ++j) {
            const double Tj = snapshot_times[j];
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (snap_done[j * u.size() + i]) continue;
                const double c0 = credit.values[i], c1 = next_credit.values[i];
                if (c1 >= Tj - 1e-15) {
                    const double th = (c1 > c0 + 1e-15)
                                          ? std::clamp((Tj - c0) / (c1 - c0), 0.0, 1.0)
                                          : 1.0;
                    res.snapshots[j].values[i] =
                        u.values[i] + th * (next.values[i] - u.values[i]);
                    snap_done[j * u.size() + i] = 1;
                }
            }
        }
        const double ch = sup_change_finite(next, u);
        u = std::move(next);
        credit = std::move(next_credit);
        if ((step & 15) == 0 || ch < config.tol)
            res.report.records.push_back({(step + 1) * config.dt, ch, ch,
                                          seconds_since(t0)});
    }

    // Nodes that never reached a snapshot time keep their last value.
    std::size_t missing = 0;
    for (std::size_t j = 0; j < snapshot_times.size(); ++j)
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!snap_done[j * u.size() + i]) {
                res.snapshots[j].values[i] = u.values[i];
                ++missing;
            }
    res.report.provisional_nodes = missing;
    res.report.verdict =
        missing == 0 ? Verdict::Converged : Verdict::BudgetExhausted;
    res.final_field = std::move(u);
    res.credit = std::move(credit);
    return res;
}

namespace {

// Shared infinity classification for the two limit drivers: a node is marked
// infinite when it exceeded the threshold and grew on each of the last three
// schedule steps.
struct GrowthTracker {
    explicit GrowthTracker(std::size_t n) : streak(n, 0) {}
    std::vector<int> streak;

    void update(const ValueField& prev, const ValueField& cur, double slope) {
        for (std::size_t i = 0; i < streak.size(); ++i) {
            const double d = cur.values[i] - prev.values[i];
            if (d > slope) ++streak[i];
            else streak[i] = 0;
        }
    }

    void classify(ValueField& field, double threshold,
                  std::size_t& provisional) const {
        provisional = 0;
        for (std::size_t i = 0; i < streak.size(); ++i) {
            if (streak[i] >= 3) {
                if (field.values[i] > threshold)
                    field.values[i] = kInfiniteValue;
                else
                    ++provisional;  // growing but not yet past the threshold
            }
        }
    }
};

}  // namespace

LimitResult limit_finite_horizon(const ControlProblem& problem, const Grid& grid,
                                 const SolverConfig& config,
                                 const std::vector<double>& horizons) {
    if (horizons.empty()) throw ConfigError("empty horizon schedule");
    const auto t0 = Clock::now();
    SchemeModel model = SchemeModel::for_problem(problem, require_mesh(config));
    LimitResult res{ValueField(grid), {}};
    res.report.cfl_warning =
        config.dt * max_speed(model, grid) > grid.max_spacing() + 1e-15;

    ValueField u(grid);
    ValueField prev_snapshot = u;
    ValueField before_last = u;  // second-to-last schedule snapshot
    GrowthTracker growth(u.size());
    double s = 0.0;
    int total_steps = 0;
    for (double h : horizons) {
        while (s < h - 1e-12 && total_steps < config.max_iterations) {
            u = sl_step(model, u, config.dt, 0.0, false, nullptr, config.threads,
                        &res.report.boundary_clamps);
            s += config.dt;
            ++total_steps;
        }
        const double change = sup_change_finite(u, prev_snapshot);
        growth.update(prev_snapshot, u, config.growth_slope);
        res.report.records.push_back({s, change, change, seconds_since(t0)});
        before_last = std::move(prev_snapshot);
        prev_snapshot = u;
    }
    res.field = u;
    growth.classify(res.field, config.infinity_threshold,
                    res.report.provisional_nodes);
    // Convergence is judged on the nodes that end up finite.
    double finite_change = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!is_infinite_value(res.field.values[i]))
            finite_change = std::max(
                finite_change, std::abs(u.values[i] - before_last.values[i]));
    res.report.verdict = (finite_change < config.tol &&
                          res.report.provisional_nodes == 0)
                             ? Verdict::Converged
                             : Verdict::BudgetExhausted;
    return res;
}

LimitResult solve_discounted(const ControlProblem& problem, const Grid& grid,
                             const SolverConfig& config, double delta,
                             const ValueField* warm_start) {
    if (!(delta > 0.0)) throw DomainError("discount rate must be positive");
    const auto t0 = Clock::now();
    SchemeModel model = SchemeModel::for_problem(problem, require_mesh(config));
    LimitResult res{warm_start ? *warm_start : ValueField(grid), {}};
    res.report.cfl_warning =
        config.dt * max_speed(model, grid) > grid.max_spacing() + 1e-15;

    double prev_residual = kInfiniteValue;
    int climbing = 0;
    for (int it = 0; it < config.max_iterations; ++it) {
        ValueField next = sl_step(model, res.field, config.dt, delta, false,
                                  nullptr, config.threads,
                                  &res.report.boundary_clamps);
        const double residual = sup_change_finite(next, res.field);
        res.field = std::move(next);
        if ((it & 31) == 0 || residual < config.tol)
            res.report.records.push_back({delta, residual, residual,
                                          seconds_since(t0)});
        if (residual < config.tol) {
            res.report.verdict = Verdict::Converged;
            return res;
        }
        climbing = (residual > prev_residual * (1.0 + 1e-12)) ? climbing + 1 : 0;
        if (climbing > 10) {
            res.report.verdict = Verdict::Diverged;
            return res;
        }
        prev_residual = residual;
    }
    res.report.verdict = Verdict::BudgetExhausted;
    return res;
}

LimitResult limit_discounted(const ControlProblem& problem, const Grid& grid,
                             const SolverConfig& config,
                             const std::vector<double>& deltas) {
    if (deltas.empty()) throw ConfigError("empty delta schedule");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw ConfigError("delta schedule must be strictly decreasing");
    const auto t0 = Clock::now();
    LimitResult res{ValueField(grid), {}};
    ValueField prev(grid);
    GrowthTracker growth(prev.size());
    double last_change = kInfiniteValue;
    bool first = true;
    for (double delta : deltas) {
        LimitResult step = solve_discounted(problem, grid, config, delta,
                                            first ? nullptr : &res.field);
        res.report.cfl_warning |= step.report.cfl_warning;
        res.report.boundary_clamps += step.report.boundary_clamps;
        if (step.report.verdict == Verdict::Diverged) {
            res.report.verdict = Verdict::Diverged;
            res.field = std::move(step.field);
            return res;
        }
        if (!first) {
            last_change = sup_change_finite(step.field, res.field);
            growth.update(res.field, step.field, config.growth_slope);
        }
        res.field = std::move(step.field);
        res.report.records.push_back({delta, first ? 0.0 : last_change,
                                      step.report.records.empty()
                                          ? 0.0
                                          : step.report.records.back().residual,
                                      seconds_since(t0)});
        first = false;
    }
    growth.classify(res.field, config.infinity_threshold,
                    res.report.provisional_nodes);
    res.report.verdict = (last_change < config.tol &&
                          res.report.provisional_nodes == 0)
                             ? Verdict::Converged
                             : Verdict::BudgetExhausted;
    return res;
}

KruzkovResult solve_kruzkov(const ControlProblem& problem, const Grid& grid,
                            const SolverConfig& config,
                            const TargetSet& target) {
    const auto t0 = Clock::now();
    SchemeModel model = SchemeModel::for_problem(problem, require_mesh(config));

    std::vector<char> mask(grid.node_count(), 0);
    std::size_t hits = 0;
    const double reach = 0.49 * grid.min_spacing();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const Vec x = grid.coords(i);
        if (target.membership(x) || target.distance(x) <= reach) {
            mask[i] = 1;
            ++hits;
        }
    }
    if (hits == 0) throw ConfigError("target set contains no grid nodes");

    KruzkovResult res{ValueField(grid), ValueField(grid), {}, {}};
    res.report.cfl_warning =
        config.dt * max_speed(model, grid) > grid.max_spacing() + 1e-15;
    for (int it = 0; it < config.max_iterations; ++it) {
        ValueField next = sl_step(model, res.U, config.dt, 0.0, true, &mask,
                                  config.threads, &res.report.boundary_clamps);
        const double residual = sup_change_finite(next, res.U);
        res.U = std::move(next);
        if ((it & 31) == 0 || residual < config.tol)
            res.report.records.push_back({static_cast<double>(it), residual,
                                          residual, seconds_since(t0)});
        if (residual < config.tol) {
            res.report.verdict = Verdict::Converged;
            break;
        }
    }

    const double one_minus = std::exp(-config.infinity_threshold);
    res.domain_mask.assign(res.U.size(), 0);
    for (std::size_t i = 0; i < res.U.size(); ++i) {
        const double u = std::clamp(res.U.values[i], 0.0, 1.0);
        if (1.0 - u < one_minus) {
            res.V.values[i] = kInfiniteValue;
        } else {
            res.V.values[i] = -std::log1p(-u);
            res.domain_mask[i] = 1;
        }
    }
    return res;
}

std::vector<double> default_delta_schedule(int k_max) {
    std::vector<double> ds;
    for (int k = 1; k <= k_max; ++k) ds.push_back(std::pow(2.0, -k));
    return ds;
}

ErgodicResult solve_ergodic(const ControlProblem& problem, const Grid& grid,
                            const SolverConfig& config,
                            const std::vector<double>& deltas,
                            double flatness_tol) {
    for (const Axis& ax : grid.axes)
        if (!ax.periodic)
            throw ConfigError("ergodic solve requires all axes periodic");
    if (deltas.size() < 2) throw ConfigError("need at least two deltas");
    const auto t0 = Clock::now();

    ErgodicResult res{0.0, ValueField(grid), 0.0, 0.0, {}};
    ValueField u(grid);
    std::vector<double> lambda_means;
    bool first = true;
    double delta_prev = 0.0;
    for (double delta : deltas) {
        if (!first) {
            // V_delta ~ lambda/delta + W: shift the warm start by the
            // predicted constant so iterations only have to fix W.
            double mean = 0.0;
            for (double v : u.values) mean += v;
            mean /= static_cast<double>(u.size());
            const double shift =
                delta_prev * mean * (1.0 / delta - 1.0 / delta_prev);
            for (double& v : u.values) v += shift;
        }
        LimitResult step = solve_discounted(problem, grid, config, delta,
                                            first ? nullptr : &u);
        u = std::move(step.field);
        double mean = 0.0;
        for (double v : u.values) mean += v;
        mean = delta * mean / static_cast<double>(u.size());
        lambda_means.push_back(mean);
        res.report.records.push_back({delta,
                                      step.report.records.empty()
                                          ? 0.0
                                          : step.report.records.back().residual,
                                      mean, seconds_since(t0)});
        first = false;
        delta_prev = delta;
    }

    const double dmin = deltas.back();
    double vmax = -kInfiniteValue, vmin = kInfiniteValue;
    for (double v : u.values) {
        vmax = std::max(vmax, dmin * v);
        vmin = std::min(vmin, dmin * v);
    }
    res.flatness = vmax - vmin;

    // Richardson extrapolation of the last two schedule points
    // (lambda(delta) ~ lambda + c*delta).
    const std::size_t k = lambda_means.size() - 1;
    const double d1 = deltas[k - 1], d2 = deltas[k];
    res.lambda = (lambda_means[k] * d1 - lambda_means[k - 1] * d2) / (d1 - d2);

    // Corrector W0 = V_delta - V_delta(node nearest the origin).
    std::size_t origin = 0;
    double best = kInfiniteValue;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = norm2(grid.coords(i));
        if (r < best) {
            best = r;
            origin = i;
        }
    }
    res.corrector = u;
    const double u0 = u.values[origin];
    for (double& v : res.corrector.values) v -= u0;

    // Cell-problem residual on central finite-difference gradients.
    SchemeModel model = SchemeModel::for_problem(problem, require_mesh(config));
    Vec vel(model.n);
    double residual = 0.0;
    const std::size_t nodes = grid.node_count();
    for (std::size_t i = 0; i < nodes; ++i) {
        const Vec x = grid.coords(i);
        Vec p(grid.dim());
        for (int d = 0; d < grid.dim(); ++d) {
            Vec xp = x, xm = x;
            const double h = grid.axes[d].spacing();
            xp[d] += h;
            xm[d] -= h;
            p[d] = (interpolate(res.corrector, xp) -
                    interpolate(res.corrector, xm)) /
                   (2.0 * h);
        }
        double hval = -kInfiniteValue;
        for (std::size_t kk = 0; kk < model.mesh->size(); ++kk) {
            double cost, w0q;
            model.eval(x, kk, vel, cost, w0q);
            hval = std::max(hval, res.lambda * w0q - dot(vel, p) - cost);
        }
        residual = std::max(residual, std::abs(hval));
    }
    res.residual = residual;
    res.report.verdict =
        res.flatness <= flatness_tol ? Verdict::Converged : Verdict::Diverged;
    return res;
}

}  // namespace hjbtk
