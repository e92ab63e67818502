#pragma once

#include "hjbtk/extension.hpp"
#include "hjbtk/problem.hpp"

namespace hjbtk {

/// Finite discretization of A (points are controls) or of S(A) (points are
/// [w0, w...]). All Hamiltonian maximizations run over one of these.
struct ControlMesh {
    bool extended = false;
    std::vector<Vec> points;
    std::string provenance;

    std::size_t size() const { return points.size(); }
    void require_nonempty() const {
        if (points.empty()) throw ConfigError("control mesh is empty");
    }
};

/// Lattice over a compact box, counts per axis.
ControlMesh mesh_box(const ControlSetDescriptor& set,
                     const std::vector<int>& counts);

/// The points of a compact-finite set.
ControlMesh mesh_finite(const ControlSetDescriptor& set);

/// S(A) mesh for a cone: directions on the unit sphere of A times radii
/// r in [0,1]; w0 = (1-r^q)^(1/q). Contains the poles (1,0) and |w| = 1
/// exactly. n_dirs is used for m >= 2 (m = 1 always uses the two signs).
ControlMesh mesh_sphere_radius(const ControlProblem& problem, int n_radii,
                               int n_dirs = 16);

/// Default mesh for a problem: sphere-radius product for cones, lattice or
/// point list otherwise. `resolution` steers radii / per-axis counts.
ControlMesh default_mesh(const ControlProblem& problem, int resolution);

}  // namespace hjbtk
