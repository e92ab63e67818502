#pragma once

#include "hjbtk/certificates.hpp"
#include "hjbtk/problem.hpp"

namespace hjbtk {

/// Parses a problem-spec JSON document. Two forms:
///   {"builtin": "<name>", "params": {...}}
/// or the full schema
///   {"dimension": n,
///    "control-set": {"kind": "compact-box"|"compact-finite"|"cone", ...},
///    "growth": {"p":., "q":., "M":., "C1":., "C2":.},
///    "dynamics": ["<expr>", ...],            // n expressions in x_i, a_j
///    "lagrangian": "<expr>",
///    "recessions": {"dynamics": [...], "lagrangian": "<expr>"},   // optional
///    "target-set": {"center": [...], "radius": r}}                // optional
/// Malformed documents throw SpecError naming the offending field.
ControlProblem parse_problem_spec(const std::string& json_text);
ControlProblem load_problem_spec(const std::string& path);

struct CertificateSpec {
    Certificate certificate;
    std::string kind = "mrf";  // mrf | sc1 | sc2
    double k = 1.0;            // mrf restraint constant
    RateFn rate;               // sc1/sc2 rate function (expression in x1 = r)
    SampleRegion region;
    std::size_t samples = 10000;
};

/// Certificate-spec JSON: {"kind":., "value":expr, "gradient":[expr...],
/// "k":., "rate":expr, "region":{"lo":[..],"hi":[..]}, "samples":.}.
CertificateSpec parse_certificate_spec(const std::string& json_text, int n);
CertificateSpec load_certificate_spec(const std::string& path, int n);

}  // namespace hjbtk
