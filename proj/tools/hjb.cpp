// Command-line front end: problem ingestion, solver orchestration, artifact
// emission. Exit codes: 0 converged / pass, 1 schema violation, 2 budget
// exhausted, 3 diverged, 4 certificate margin violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hjbtk/oracles.hpp"
#include "hjbtk/spec_io.hpp"

namespace fs = std::filesystem;
using namespace hjbtk;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonFlags {
    std::string spec_path;
    std::string grid_desc;
    int mesh_resolution = 17;
    double dt = 0.05;
    double horizon = 1.0;
    double delta = 0.5;
    std::string delta_schedule;
    std::string target_desc;
    std::string out_dir = "out";
    double tol = 1e-6;
    int max_iter = 100000;
    int threads = 1;
    double infinity_threshold = 1e4;
    unsigned seed = 0;
};

// "min:max:count[p];min:max:count" -> Grid; 'p' marks a periodic axis.
Grid parse_grid(const std::string& desc) {
    if (desc.empty()) throw SpecError("--grid is required");
    std::vector<Axis> axes;
    std::stringstream ss(desc);
    std::string part;
    while (std::getline(ss, part, ';')) {
        Axis ax;
        bool periodic = false;
        if (!part.empty() && part.back() == 'p') {
            periodic = true;
            part.pop_back();
        }
        double mn, mx;
        int count;
        char c1, c2;
        std::stringstream ps(part);
        if (!(ps >> mn >> c1 >> mx >> c2 >> count) || c1 != ':' || c2 != ':')
            throw SpecError("bad grid axis '" + part +
                            "', expected min:max:count");
        ax.min = mn;
        ax.max = mx;
        ax.count = count;
        ax.periodic = periodic;
        axes.push_back(ax);
    }
    return Grid(std::move(axes));
}

// "c1,c2,...:radius"
TargetSet parse_target(const std::string& desc) {
    const auto colon = desc.rfind(':');
    if (colon == std::string::npos)
        throw SpecError("bad target '" + desc + "', expected c1,..,cn:radius");
    Vec center;
    std::stringstream cs(desc.substr(0, colon));
    std::string tok;
    while (std::getline(cs, tok, ',')) center.push_back(std::stod(tok));
    const double radius = std::stod(desc.substr(colon + 1));
    TargetSet ts;
    ts.bounding_radius = norm2(center) + radius;
    ts.distance = [center, radius](ConstSpan x) {
        double s = 0.0;
        for (std::size_t d = 0; d < center.size(); ++d)
            s += (x[d] - center[d]) * (x[d] - center[d]);
        return std::max(0.0, std::sqrt(s) - radius);
    };
    ts.membership = [dist = ts.distance](ConstSpan x) { return dist(x) <= 0.0; };
    return ts;
}

std::vector<double> parse_schedule(const std::string& desc) {
    std::vector<double> out;
    std::stringstream ss(desc);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text << "\n";
}

std::string manifest_json(const CommonFlags& f, const std::string& command,
                          const std::string& solver) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"version\":\"" << kVersion << "\",\"command\":\"" << command
       << "\",\"solver\":\"" << solver << "\",\"spec\":\"" << f.spec_path
       << "\",\"grid\":\"" << f.grid_desc << "\",\"mesh\":" << f.mesh_resolution
       << ",\"dt\":" << f.dt << ",\"horizon\":" << f.horizon
       << ",\"delta\":" << f.delta << ",\"delta_schedule\":\""
       << f.delta_schedule << "\",\"target\":\"" << f.target_desc
       << "\",\"tol\":" << f.tol << ",\"max_iter\":" << f.max_iter
       << ",\"threads\":" << f.threads << ",\"infinity_threshold\":"
       << f.infinity_threshold << ",\"seed\":" << f.seed << "}";
    return os.str();
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Converged: return 0;
        case Verdict::BudgetExhausted: return 2;
        case Verdict::Diverged: return 3;
    }
    return 3;
}

SolverConfig make_config(const CommonFlags& f, const ControlMesh& mesh) {
    SolverConfig cfg;
    cfg.mesh = &mesh;
    cfg.dt = f.dt;
    cfg.tol = f.tol;
    cfg.max_iterations = f.max_iter;
    cfg.infinity_threshold = f.infinity_threshold;
    cfg.threads = f.threads;
    return cfg;
}

int run_solve(const CommonFlags& f, const std::string& solver) {
    ControlProblem problem = load_problem_spec(f.spec_path);
    Grid grid = parse_grid(f.grid_desc);
    ControlMesh mesh = default_mesh(problem, f.mesh_resolution);
    SolverConfig cfg = make_config(f, mesh);
    fs::create_directories(f.out_dir);
    const fs::path dir(f.out_dir);
    write_text(dir / "manifest.json", manifest_json(f, "solve", solver));

    ConvergenceReport report;
    if (solver == "finite") {
        auto res = solve_finite_horizon(problem, grid, cfg, f.horizon,
                                        {f.horizon});
        write_field(res.snapshots[0], (dir / "value").string());
        report = res.report;
    } else if (solver == "discounted") {
        auto res = solve_discounted(problem, grid, cfg, f.delta);
        write_field(res.field, (dir / "value").string());
        report = res.report;
    } else if (solver == "kruzkov") {
        TargetSet target = f.target_desc.empty()
                               ? (problem.target
                                      ? *problem.target
                                      : throw SpecError(
                                            "kruzkov needs a target set"))
                               : parse_target(f.target_desc);
        auto res = solve_kruzkov(problem, grid, cfg, target);
        write_field(res.U, (dir / "kruzkov").string());
        write_field(res.V, (dir / "value").string());
        report = res.report;
    } else if (solver == "ergodic") {
        std::vector<double> deltas = f.delta_schedule.empty()
                                         ? default_delta_schedule(10)
                                         : parse_schedule(f.delta_schedule);
        auto res = solve_ergodic(problem, grid, cfg, deltas);
        write_field(res.corrector, (dir / "corrector").string());
        std::ostringstream os;
        os.precision(17);
        os << "{\"lambda\":" << res.lambda << ",\"flatness\":" << res.flatness
           << ",\"residual\":" << res.residual << "}";
        write_text(dir / "ergodic.json", os.str());
        report = res.report;
    } else {
        throw SpecError("unknown solver '" + solver + "'");
    }
    write_text(dir / "report.json", report.to_json());
    return verdict_exit(report.verdict);
}

int run_limits(const CommonFlags& f) {
    ControlProblem problem = load_problem_spec(f.spec_path);
    Grid grid = parse_grid(f.grid_desc);
    ControlMesh mesh = default_mesh(problem, f.mesh_resolution);
    SolverConfig cfg = make_config(f, mesh);
    fs::create_directories(f.out_dir);
    const fs::path dir(f.out_dir);
    write_text(dir / "manifest.json", manifest_json(f, "limits", ""));

    std::vector<double> deltas = f.delta_schedule.empty()
                                     ? default_delta_schedule(8)
                                     : parse_schedule(f.delta_schedule);
    // Horizons paired with the discount schedule: T_k = 1/delta_k.
    std::vector<double> horizons;
    for (double d : deltas) horizons.push_back(1.0 / d);

    auto fh = limit_finite_horizon(problem, grid, cfg, horizons);
    auto dc = limit_discounted(problem, grid, cfg, deltas);
    write_field(fh.field, (dir / "limit_finite").string());
    write_field(dc.field, (dir / "limit_discounted").string());
    write_text(dir / "report_finite.json", fh.report.to_json());
    write_text(dir / "report_discounted.json", dc.report.to_json());

    const SupDiff diff = sup_diff(fh.field, dc.field);
    std::ostringstream os;
    os.precision(17);
    os << "{\"sup_diff\":" << diff.sup
       << ",\"infinity_disagreements\":" << diff.infinity_disagreements
       << ",\"cofinite_nodes\":" << diff.cofinite_nodes << "}";
    write_text(dir / "comparison.json", os.str());

    if (fh.report.verdict == Verdict::Diverged ||
        dc.report.verdict == Verdict::Diverged)
        return 3;
    if (fh.report.verdict == Verdict::BudgetExhausted ||
        dc.report.verdict == Verdict::BudgetExhausted)
        return 2;
    return 0;
}

int run_certify(const CommonFlags& f, const std::string& cert_path) {
    ControlProblem problem = load_problem_spec(f.spec_path);
    CertificateSpec cs = load_certificate_spec(cert_path, problem.n);
    ControlMesh mesh = default_mesh(problem, f.mesh_resolution);
    TargetSet target = f.target_desc.empty()
                           ? (problem.target
                                  ? *problem.target
                                  : throw SpecError("certify needs a target"))
                           : parse_target(f.target_desc);
    fs::create_directories(f.out_dir);
    const fs::path dir(f.out_dir);
    write_text(dir / "manifest.json", manifest_json(f, "certify", cs.kind));

    MarginReport rep;
    if (cs.kind == "mrf") {
        rep = check_mrf(problem, cs.certificate, target, cs.k, cs.region, mesh,
                        cs.samples, f.seed);
    } else if (cs.kind == "sc1") {
        ExtendedProblem ext = extend(problem);
        ControlMesh smesh = mesh.extended ? mesh
                                          : default_mesh(problem,
                                                         f.mesh_resolution);
        rep = check_sc1(ext, cs.certificate, target, cs.rate, cs.region, smesh,
                        cs.samples, f.seed);
    } else {
        rep = check_sc2(problem, target, cs.rate, cs.region, mesh, cs.samples,
                        f.seed);
    }
    write_text(dir / "margins.json", rep.to_json());
    std::cout << rep.to_json() << "\n";
    return rep.pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value-function toolkit for deterministic optimal control"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonFlags f;
    std::string solver = "discounted";
    std::string cert_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("spec", f.spec_path, "problem-spec JSON file")
            ->required();
        cmd->add_option("--grid", f.grid_desc,
                        "axes as min:max:count[p], ';'-separated");
        cmd->add_option("--mesh", f.mesh_resolution, "control-mesh resolution");
        cmd->add_option("--dt", f.dt, "time step");
        cmd->add_option("--horizon", f.horizon, "finite horizon");
        cmd->add_option("--delta", f.delta, "discount rate");
        cmd->add_option("--delta-schedule", f.delta_schedule,
                        "comma-separated decreasing discounts");
        cmd->add_option("--target", f.target_desc, "target as c1,..,cn:radius");
        cmd->add_option("--out-dir", f.out_dir, "output directory");
        cmd->add_option("--tol", f.tol, "convergence tolerance");
        cmd->add_option("--max-iter", f.max_iter, "iteration budget");
        cmd->add_option("--threads", f.threads, "sweep parallelism");
        cmd->add_option("--infinity-threshold", f.infinity_threshold,
                        "value treated as numerically infinite");
        cmd->add_option("--seed", f.seed, "sampling seed");
    };

    CLI::App* solve = app.add_subcommand("solve", "run one solver");
    add_common(solve);
    solve->add_option("--solver", solver,
                      "finite | discounted | kruzkov | ergodic");

    CLI::App* limits = app.add_subcommand(
        "limits", "compare the horizon and vanishing-discount limits");
    add_common(limits);

    CLI::App* certify = app.add_subcommand("certify", "margin-check a certificate");
    add_common(certify);
    certify->add_option("--certificate", cert_path, "certificate-spec JSON")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(f, solver);
        if (limits->parsed()) return run_limits(f);
        return run_certify(f, cert_path);
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
