#include "hjbtk/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "hjbtk/expr.hpp"

namespace hjbtk {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("not valid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw SpecError(std::string("missing field '") + key + "'");
    return *it;
}

double num_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number())
        throw SpecError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

Expression parse_expr_field(const json& v, const std::string& what, int n,
                            int m) {
    if (!v.is_string())
        throw SpecError(what + " must be an expression string");
    Expression e = Expression::parse(v.get<std::string>());
    if (e.max_x() > n)
        throw SpecError(what + " references x" + std::to_string(e.max_x()) +
                        " but dimension is " + std::to_string(n));
    if (e.max_a() > m)
        throw SpecError(what + " references a" + std::to_string(e.max_a()) +
                        " but the control set has dimension " +
                        std::to_string(m));
    return e;
}

// n expressions -> one vector-valued evaluator
DynamicsFn vector_evaluator(const json& arr, const std::string& what, int n,
                            int m) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
        throw SpecError(what + " must be an array of " + std::to_string(n) +
                        " expressions");
    auto exprs = std::make_shared<std::vector<Expression>>();
    for (int d = 0; d < n; ++d)
        exprs->push_back(parse_expr_field(arr[static_cast<std::size_t>(d)],
                                          what + "[" + std::to_string(d) + "]",
                                          n, m));
    return [exprs](ConstSpan x, ConstSpan a, Span out) {
        for (std::size_t d = 0; d < exprs->size(); ++d)
            out[d] = (*exprs)[d].eval(x, a);
    };
}

LagrangianFn scalar_evaluator(const json& v, const std::string& what, int n,
                              int m) {
    auto e = std::make_shared<Expression>(parse_expr_field(v, what, n, m));
    return [e](ConstSpan x, ConstSpan a) { return e->eval(x, a); };
}

ControlSetDescriptor parse_control_set(const json& j) {
    const json& cs = field(j, "control-set");
    const std::string kind = field(cs, "kind").get<std::string>();
    if (kind == "compact-box") {
        const json& b = field(cs, "bounds");
        if (!b.is_array() || b.empty())
            throw SpecError("control-set.bounds must be a nonempty array");
        std::vector<std::pair<double, double>> bounds;
        for (const json& iv : b) {
            if (!iv.is_array() || iv.size() != 2)
                throw SpecError("each bound must be [lo, hi]");
            bounds.emplace_back(iv[0].get<double>(), iv[1].get<double>());
        }
        return ControlSetDescriptor::box(std::move(bounds));
    }
    if (kind == "compact-finite") {
        const json& p = field(cs, "points");
        if (!p.is_array() || p.empty())
            throw SpecError("control-set.points must be a nonempty array");
        std::vector<Vec> pts;
        for (const json& pt : p) pts.push_back(pt.get<Vec>());
        return ControlSetDescriptor::finite(std::move(pts));
    }
    if (kind == "cone") {
        const int m = static_cast<int>(num_field(cs, "dimension"));
        if (m < 1) throw SpecError("cone dimension must be positive");
        return ControlSetDescriptor::full_cone(m);
    }
    throw SpecError("unknown control-set kind '" + kind + "'");
}

GrowthData parse_growth(const json& j, bool cone) {
    const json& g = field(j, "growth");
    GrowthData gd;
    gd.p = static_cast<int>(num_field(g, "p"));
    gd.q = static_cast<int>(num_field(g, "q"));
    gd.M = num_field(g, "M");
    if (g.contains("C1")) gd.C1 = g["C1"].get<double>();
    if (g.contains("C2")) gd.C2 = g["C2"].get<double>();
    try {
        gd.validate(cone);
    } catch (const Error& e) {
        throw SpecError(std::string("growth: ") + e.what());
    }
    return gd;
}

TargetSet parse_target(const json& t, int n) {
    Vec center = field(t, "center").get<Vec>();
    if (static_cast<int>(center.size()) != n)
        throw SpecError("target-set.center has the wrong dimension");
    const double radius = num_field(t, "radius");
    if (radius < 0.0) throw SpecError("target-set.radius must be >= 0");
    TargetSet ts;
    ts.bounding_radius = norm2(center) + radius;
    ts.distance = [center, radius](ConstSpan x) {
        double s = 0.0;
        for (std::size_t d = 0; d < center.size(); ++d)
            s += (x[d] - center[d]) * (x[d] - center[d]);
        return std::max(0.0, std::sqrt(s) - radius);
    };
    ts.membership = [dist = ts.distance](ConstSpan x) {
        return dist(x) <= 0.0;
    };
    return ts;
}

}  // namespace

ControlProblem parse_problem_spec(const std::string& json_text) {
    const json j = parse_json(json_text);
    if (!j.is_object()) throw SpecError("spec root must be an object");

    if (j.contains("builtin")) {
        const json& b = j["builtin"];
        if (!b.is_string()) throw SpecError("'builtin' must be a string");
        std::map<std::string, double> params;
        if (j.contains("params")) {
            if (!j["params"].is_object())
                throw SpecError("'params' must be an object of numbers");
            for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
                if (!it.value().is_number())
                    throw SpecError("param '" + it.key() + "' must be a number");
                params[it.key()] = it.value().get<double>();
            }
        }
        try {
            return builtin(b.get<std::string>(), params);
        } catch (const LookupError& e) {
            throw SpecError(e.what());
        }
    }

    ControlProblem p;
    p.n = static_cast<int>(num_field(j, "dimension"));
    if (p.n < 1) throw SpecError("dimension must be positive");
    p.control_set = parse_control_set(j);
    const int m = p.control_set.m;
    p.growth = parse_growth(j, !p.control_set.compact());
    p.f = vector_evaluator(field(j, "dynamics"), "dynamics", p.n, m);
    p.l = scalar_evaluator(field(j, "lagrangian"), "lagrangian", p.n, m);
    if (j.contains("recessions")) {
        const json& r = j["recessions"];
        if (r.contains("dynamics"))
            p.f_recession = vector_evaluator(r["dynamics"],
                                             "recessions.dynamics", p.n, m);
        if (r.contains("lagrangian"))
            p.l_recession = scalar_evaluator(r["lagrangian"],
                                             "recessions.lagrangian", p.n, m);
    }
    if (j.contains("target-set")) p.target = parse_target(j["target-set"], p.n);
    if (j.contains("name")) p.name = j["name"].get<std::string>();
    return p;
}

ControlProblem load_problem_spec(const std::string& path) {
    return parse_problem_spec(read_file(path));
}

CertificateSpec parse_certificate_spec(const std::string& json_text, int n) {
    const json j = parse_json(json_text);
    if (!j.is_object()) throw SpecError("certificate root must be an object");

    CertificateSpec cs;
    if (j.contains("kind")) cs.kind = j["kind"].get<std::string>();
    if (cs.kind != "mrf" && cs.kind != "sc1" && cs.kind != "sc2")
        throw SpecError("certificate kind must be mrf, sc1, or sc2");

    if (cs.kind != "sc2") {
        auto v = std::make_shared<Expression>(
            parse_expr_field(field(j, "value"), "value", n, 0));
        cs.certificate.value = [v](ConstSpan x) { return v->eval(x, {}); };

        const json& g = field(j, "gradient");
        if (!g.is_array() || static_cast<int>(g.size()) != n)
            throw SpecError("gradient must list one expression per dimension");
        auto grads = std::make_shared<std::vector<Expression>>();
        for (int d = 0; d < n; ++d)
            grads->push_back(parse_expr_field(
                g[static_cast<std::size_t>(d)],
                "gradient[" + std::to_string(d) + "]", n, 0));
        cs.certificate.gradient = [grads](ConstSpan x) {
            Vec out(grads->size());
            for (std::size_t d = 0; d < grads->size(); ++d)
                out[d] = (*grads)[d].eval(x, {});
            return out;
        };
    }

    if (j.contains("k")) cs.k = num_field(j, "k");
    if (j.contains("rate")) {
        auto r = std::make_shared<Expression>(
            parse_expr_field(j["rate"], "rate", 1, 0));
        cs.rate = [r](double d) {
            const double v[1] = {d};
            return r->eval(ConstSpan(v, 1), {});
        };
    } else if (cs.kind != "mrf") {
        throw SpecError("certificate kind '" + cs.kind + "' needs a rate");
    }

    const json& reg = field(j, "region");
    cs.region.lo = field(reg, "lo").get<Vec>();
    cs.region.hi = field(reg, "hi").get<Vec>();
    if (static_cast<int>(cs.region.lo.size()) != n ||
        static_cast<int>(cs.region.hi.size()) != n)
        throw SpecError("region lo/hi must have the problem dimension");
    if (j.contains("samples"))
        cs.samples = j["samples"].get<std::size_t>();
    return cs;
}

CertificateSpec load_certificate_spec(const std::string& path, int n) {
    return parse_certificate_spec(read_file(path), n);
}

}  // namespace hjbtk
