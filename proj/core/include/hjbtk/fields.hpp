#pragma once

#include <iosfwd>
#include <limits>

#include "hjbtk/types.hpp"

namespace hjbtk {

/// Explicit marker for a node whose value is +infinity. IEEE infinity keeps
/// the required arithmetic (inf + c = inf, min(inf, c) = c) and is exactly
/// distinguishable from any finite value.
inline constexpr double kInfiniteValue = std::numeric_limits<double>::infinity();
inline bool is_infinite_value(double v) { return std::isinf(v); }

struct Axis {
    double min = 0.0;
    double max = 1.0;
    int count = 2;     // >= 2
    bool periodic = false;

    /// Node spacing. Periodic axes cover [min, max) with `count` nodes.
    double spacing() const {
        return periodic ? (max - min) / count : (max - min) / (count - 1);
    }
    double node(int i) const { return min + i * spacing(); }
};

struct Grid {
    std::vector<Axis> axes;

    explicit Grid(std::vector<Axis> a = {});
    int dim() const { return static_cast<int>(axes.size()); }
    std::size_t node_count() const { return total_; }
    double min_spacing() const;
    double max_spacing() const;

    Vec coords(std::size_t flat) const;
    std::size_t flat(const std::vector<int>& idx) const;

    bool same_as(const Grid& other) const;

private:
    std::size_t total_ = 0;
};

struct ValueField {
    Grid grid;
    Vec values;  // finite >= 0 or kInfiniteValue

    explicit ValueField(Grid g, double fill = 0.0)
        : grid(std::move(g)), values(grid.node_count(), fill) {}

    std::size_t size() const { return values.size(); }
    std::size_t count_infinite() const;
};

/// Multilinear interpolation; periodic axes wrap, non-periodic points outside
/// the box throw OutOfDomain. Any infinite stencil node yields infinity.
double interpolate(const ValueField& field, ConstSpan x);

/// As interpolate, but clamps non-periodic coordinates into the box
/// (one-sided extrapolation by the outermost layer). clamped is incremented
/// when clamping occurred.
double interpolate_clamped(const ValueField& field, ConstSpan x,
                           std::size_t* clamped = nullptr);

struct SupDiff {
    double sup = 0.0;                 // over nodes finite in both fields
    std::size_t infinity_disagreements = 0;
    std::size_t cofinite_nodes = 0;
};

SupDiff sup_diff(const ValueField& a, const ValueField& b);

/// CSV export: one row per node (coordinates..., value | "inf"), plus a JSON
/// metadata sidecar describing the grid.
void write_csv(const ValueField& field, std::ostream& os);
void write_field(const ValueField& field, const std::string& path_prefix);
std::string grid_json(const Grid& grid);

}  // namespace hjbtk
