#pragma once

#include "hjbtk/mesh.hpp"

namespace hjbtk {

struct HamiltonianValue {
    double value = 0.0;
    std::size_t argmax = 0;  // index into the mesh; ties go to the first index
};

/// H(x,p) = max over the mesh of -<f,p> - l (compact form).
HamiltonianValue eval_H(const ControlProblem& problem, const ControlMesh& mesh,
                        ConstSpan x, ConstSpan p);

/// Extended H(x,p) = max over the S(A) mesh of -<f_bar,p> - l_bar.
HamiltonianValue eval_H(const ExtendedProblem& ext, const ControlMesh& mesh,
                        ConstSpan x, ConstSpan p);

/// Discounted Hamiltonian: max of delta*r*w0^q - <f_bar,p> - l_bar.
double eval_H_delta(const ExtendedProblem& ext, const ControlMesh& mesh,
                    ConstSpan x, double r, ConstSpan p, double delta);

/// Kruzkov Hamiltonian: max of -<f_bar,p> - l_bar*(1-u), u in [0,1].
double eval_K(const ExtendedProblem& ext, const ControlMesh& mesh, ConstSpan x,
              double u, ConstSpan p);

/// Effective (ergodic) Hamiltonian: max of -<f_bar,p> - l_bar + lambda*w0^q.
double eval_H_tilde(const ExtendedProblem& ext, const ControlMesh& mesh,
                    ConstSpan x, ConstSpan p, double lambda);

}  // namespace hjbtk
