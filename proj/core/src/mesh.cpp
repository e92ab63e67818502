#include "hjbtk/mesh.hpp"

#include <cmath>
#include <numbers>

namespace hjbtk {

ControlMesh mesh_box(const ControlSetDescriptor& set,
                     const std::vector<int>& counts) {
    if (set.kind != ControlSetKind::CompactBox)
        throw ConfigError("mesh_box requires a compact-box control set");
    if (static_cast<int>(counts.size()) != set.m)
        throw ConfigError("mesh_box: one count per control coordinate required");
    ControlMesh mesh;
    mesh.provenance = "box lattice";
    std::vector<int> idx(set.m, 0);
    for (;;) {
        Vec p(set.m);
        for (int i = 0; i < set.m; ++i) {
            const auto& [lo, hi] = set.bounds[i];
            p[i] = counts[i] == 1 ? 0.5 * (lo + hi)
                                  : lo + (hi - lo) * idx[i] / (counts[i] - 1);
        }
        mesh.points.push_back(std::move(p));
        int i = 0;
        while (i < set.m && ++idx[i] == counts[i]) idx[i++] = 0;
        if (i == set.m) break;
    }
    return mesh;
}

ControlMesh mesh_finite(const ControlSetDescriptor& set) {
    if (set.kind != ControlSetKind::CompactFinite)
        throw ConfigError("mesh_finite requires a compact-finite control set");
    ControlMesh mesh;
    mesh.provenance = "finite set";
    mesh.points = set.points;
    return mesh;
}

namespace {

std::vector<Vec> sphere_directions(const ControlSetDescriptor& set, int n_dirs) {
    std::vector<Vec> dirs;
    if (set.m == 1) {
        for (double s : {1.0, -1.0}) {
            Vec d{s};
            if (set.contains(d)) dirs.push_back(d);
        }
    } else if (set.m == 2) {
        for (int k = 0; k < n_dirs; ++k) {
            const double th = 2.0 * std::numbers::pi * k / n_dirs;
            Vec d{std::cos(th), std::sin(th)};
            if (set.contains(d)) dirs.push_back(d);
        }
    } else {
        throw ConfigError("sphere directions implemented for m <= 2");
    }
    if (dirs.empty())
        throw ConfigError("no unit direction of the cone found");
    return dirs;
}

}  // namespace

ControlMesh mesh_sphere_radius(const ControlProblem& problem, int n_radii,
                               int n_dirs) {
    const auto& set = problem.control_set;
    if (set.compact())
        throw ConfigError("mesh_sphere_radius requires a cone control set");
    if (n_radii < 2) throw ConfigError("need at least two radii");
    const int q = problem.growth.q;
    ControlMesh mesh;
    mesh.extended = true;
    mesh.provenance = "sphere x radius";
    // Pole (w0,w) = (1,0) once.
    ExtendedControlPoint pole = extended_point(Vec(set.m, 0.0), 0.0, q);
    Vec p0(1 + set.m, 0.0);
    p0[0] = 1.0;
    mesh.points.push_back(p0);
    const auto dirs = sphere_directions(set, n_dirs);
    for (const Vec& d : dirs) {
        for (int j = 1; j < n_radii; ++j) {
            const double r = static_cast<double>(j) / (n_radii - 1);
            ExtendedControlPoint e = extended_point(d, r, q);
            Vec p(1 + set.m);
            p[0] = e.w0;
            std::copy(e.w.begin(), e.w.end(), p.begin() + 1);
            mesh.points.push_back(std::move(p));
        }
    }
    (void)pole;
    return mesh;
}

ControlMesh default_mesh(const ControlProblem& problem, int resolution) {
    const auto& set = problem.control_set;
    switch (set.kind) {
        case ControlSetKind::CompactFinite:
            return mesh_finite(set);
        case ControlSetKind::CompactBox:
            return mesh_box(set, std::vector<int>(set.m, resolution));
        case ControlSetKind::Cone:
            return mesh_sphere_radius(problem, resolution);
    }
    throw ConfigError("unknown control set kind");
}

}  // namespace hjbtk
