#include "hjbtk/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hjbtk {

Grid::Grid(std::vector<Axis> a) : axes(std::move(a)) {
    total_ = axes.empty() ? 0 : 1;
    for (const Axis& ax : axes) {
        if (ax.count < 2) throw ConfigError("grid axis needs at least two nodes");
        if (!(ax.min < ax.max)) throw ConfigError("grid axis requires min < max");
        total_ *= static_cast<std::size_t>(ax.count);
    }
}

double Grid::min_spacing() const {
    double h = std::numeric_limits<double>::infinity();
    for (const Axis& ax : axes) h = std::min(h, ax.spacing());
    return h;
}

double Grid::max_spacing() const {
    double h = 0.0;
    for (const Axis& ax : axes) h = std::max(h, ax.spacing());
    return h;
}

Vec Grid::coords(std::size_t flat) const {
    Vec x(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) {
        const std::size_t c = static_cast<std::size_t>(axes[d].count);
        x[d] = axes[d].node(static_cast<int>(flat % c));
        flat /= c;
    }
    return x;
}

std::size_t Grid::flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (std::size_t d = axes.size(); d-- > 0;)
        f = f * axes[d].count + static_cast<std::size_t>(idx[d]);
    return f;
}

bool Grid::same_as(const Grid& other) const {
    if (axes.size() != other.axes.size()) return false;
    for (std::size_t d = 0; d < axes.size(); ++d) {
        const Axis &a = axes[d], &b = other.axes[d];
        if (a.count != b.count || a.periodic != b.periodic ||
            std::abs(a.min - b.min) > 1e-12 || std::abs(a.max - b.max) > 1e-12)
            return false;
    }
    return true;
}

std::size_t ValueField::count_infinite() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(),
                      [](double v) { return is_infinite_value(v); }));
}

namespace {

double interp_impl(const ValueField& field, ConstSpan x, bool clamp,
                   std::size_t* clamped) {
    const Grid& g = field.grid;
    const int n = g.dim();
    if (static_cast<int>(x.size()) != n)
        throw ConfigError("interpolate: dimension mismatch");
    // Per-axis lower index and fraction.
    int lo[8];
    double frac[8];
    if (n > 8) throw ConfigError("interpolate supports up to 8 dimensions");
    for (int d = 0; d < n; ++d) {
        const Axis& ax = g.axes[d];
        const double h = ax.spacing();
        double u;
        if (ax.periodic) {
            double w = std::fmod(x[d] - ax.min, ax.max - ax.min);
            if (w < 0) w += ax.max - ax.min;
            u = w / h;
        } else {
            double xi = x[d];
            if (xi < ax.min - 1e-12 || xi > ax.max + 1e-12) {
                if (!clamp) throw OutOfDomain("interpolation point outside grid");
                xi = std::clamp(xi, ax.min, ax.max);
                if (clamped) ++*clamped;
            }
            u = (std::clamp(xi, ax.min, ax.max) - ax.min) / h;
        }
        int i0 = static_cast<int>(std::floor(u));
        if (ax.periodic) {
            frac[d] = u - i0;
            i0 = ((i0 % ax.count) + ax.count) % ax.count;
        } else {
            i0 = std::clamp(i0, 0, ax.count - 2);
            frac[d] = std::clamp(u - i0, 0.0, 1.0);
        }
        lo[d] = i0;
        frac[d] = std::clamp(frac[d], 0.0, 1.0);
    }
    // 2^n corners.
    double acc = 0.0;
    const int corners = 1 << n;
    std::vector<int> idx(n);
    for (int c = 0; c < corners; ++c) {
        double wgt = 1.0;
        for (int d = 0; d < n; ++d) {
            const Axis& ax = g.axes[d];
            const bool high = (c >> d) & 1;
            int i = lo[d] + (high ? 1 : 0);
            if (ax.periodic) i %= ax.count;
            else i = std::min(i, ax.count - 1);
            idx[d] = i;
            wgt *= high ? frac[d] : (1.0 - frac[d]);
        }
        const double v = field.values[g.flat(idx)];
        if (is_infinite_value(v)) {
            // an inf corner dominates unless its weight is exactly zero,
            // so exact-node queries next to inf stay finite
            if (wgt > 0.0) return kInfiniteValue;
            continue;
        }
        acc += wgt * v;
    }
    return acc;
}

}  // namespace

double interpolate(const ValueField& field, ConstSpan x) {
    return interp_impl(field, x, false, nullptr);
}

double interpolate_clamped(const ValueField& field, ConstSpan x,
                           std::size_t* clamped) {
    return interp_impl(field, x, true, clamped);
}

SupDiff sup_diff(const ValueField& a, const ValueField& b) {
    if (!a.grid.same_as(b.grid))
        throw ConfigError("sup_diff: fields live on different grids");
    SupDiff d;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const bool ia = is_infinite_value(a.values[i]);
        const bool ib = is_infinite_value(b.values[i]);
        if (ia != ib) {
            ++d.infinity_disagreements;
        } else if (!ia) {
            d.sup = std::max(d.sup, std::abs(a.values[i] - b.values[i]));
            ++d.cofinite_nodes;
        }
    }
    return d;
}

void write_csv(const ValueField& field, std::ostream& os) {
    const int n = field.grid.dim();
    for (int d = 0; d < n; ++d) os << "x" << d + 1 << ",";
    os << "value\n";
    os.precision(17);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        Vec x = field.grid.coords(i);
        for (double c : x) os << c << ",";
        if (is_infinite_value(field.values[i])) os << "inf\n";
        else os << field.values[i] << "\n";
    }
}

std::string grid_json(const Grid& grid) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"axes\":[";
    for (std::size_t d = 0; d < grid.axes.size(); ++d) {
        const Axis& ax = grid.axes[d];
        os << (d ? "," : "") << "{\"min\":" << ax.min << ",\"max\":" << ax.max
           << ",\"count\":" << ax.count
           << ",\"periodic\":" << (ax.periodic ? "true" : "false") << "}";
    }
    os << "]}";
    return os.str();
}

void write_field(const ValueField& field, const std::string& path_prefix) {
    std::ofstream csv(path_prefix + ".csv");
    if (!csv) throw ConfigError("cannot open " + path_prefix + ".csv");
    write_csv(field, csv);
    std::ofstream meta(path_prefix + ".meta.json");
    meta << grid_json(field.grid) << "\n";
}

}  // namespace hjbtk
