#include "hjbtk/hamiltonians.hpp"

#include <cmath>

namespace hjbtk {

namespace {

// Shared maximization loop; term(i, fdotp, lval, w0q) supplies the objective.
template <class Eval>
HamiltonianValue maximize(const ControlMesh& mesh, Eval&& objective) {
    mesh.require_nonempty();
    HamiltonianValue best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.points.size(); ++i) {
        const double v = objective(mesh.points[i]);
        if (v > best.value) {
            best.value = v;
            best.argmax = i;
        }
    }
    return best;
}

}  // namespace

HamiltonianValue eval_H(const ControlProblem& problem, const ControlMesh& mesh,
                        ConstSpan x, ConstSpan p) {
    if (mesh.extended)
        throw ConfigError("compact Hamiltonian needs an A mesh, got S(A)");
    Vec vel(problem.n);
    return maximize(mesh, [&](const Vec& a) {
        problem.f(x, a, vel);
        return -dot(vel, p) - problem.l(x, a);
    });
}

HamiltonianValue eval_H(const ExtendedProblem& ext, const ControlMesh& mesh,
                        ConstSpan x, ConstSpan p) {
    if (!mesh.extended)
        throw ConfigError("extended Hamiltonian needs an S(A) mesh");
    Vec vel(ext.n());
    return maximize(mesh, [&](const Vec& pt) {
        ConstSpan w(pt.data() + 1, pt.size() - 1);
        ext.f_bar(x, pt[0], w, vel);
        return -dot(vel, p) - ext.l_bar(x, pt[0], w);
    });
}

double eval_H_delta(const ExtendedProblem& ext, const ControlMesh& mesh,
                    ConstSpan x, double r, ConstSpan p, double delta) {
    if (!mesh.extended)
        throw ConfigError("H_delta needs an S(A) mesh");
    const int q = ext.q();
    Vec vel(ext.n());
    return maximize(mesh, [&](const Vec& pt) {
               ConstSpan w(pt.data() + 1, pt.size() - 1);
               ext.f_bar(x, pt[0], w, vel);
               return delta * r * std::pow(pt[0], q) - dot(vel, p) -
                      ext.l_bar(x, pt[0], w);
           })
        .value;
}

double eval_K(const ExtendedProblem& ext, const ControlMesh& mesh, ConstSpan x,
              double u, ConstSpan p) {
    if (u < 0.0 || u > 1.0)
        throw DomainError("Kruzkov argument u must lie in [0,1]");
    if (!mesh.extended) throw ConfigError("K needs an S(A) mesh");
    Vec vel(ext.n());
    return maximize(mesh, [&](const Vec& pt) {
               ConstSpan w(pt.data() + 1, pt.size() - 1);
               ext.f_bar(x, pt[0], w, vel);
               return -dot(vel, p) - ext.l_bar(x, pt[0], w) * (1.0 - u);
           })
        .value;
}

double eval_H_tilde(const ExtendedProblem& ext, const ControlMesh& mesh,
                    ConstSpan x, ConstSpan p, double lambda) {
    if (!mesh.extended) throw ConfigError("H_tilde needs an S(A) mesh");
    const int q = ext.q();
    Vec vel(ext.n());
    return maximize(mesh, [&](const Vec& pt) {
               ConstSpan w(pt.data() + 1, pt.size() - 1);
               ext.f_bar(x, pt[0], w, vel);
               return -dot(vel, p) - ext.l_bar(x, pt[0], w) +
                      lambda * std::pow(pt[0], q);
           })
        .value;
}

}  // namespace hjbtk
