#pragma once

#include <cmath>
#include <cstddef>

#include "tclab/errors.hpp"

namespace tclab {

// Uniform time grid 0 = t_0 < t_1 < ... < t_n = t_max with n = n_steps.
// Paths on a grid store n_steps + 1 values (node count).
struct PathGrid {
    double t_max = 1.0;
    int n_steps = 1;

    double step() const { return t_max / n_steps; }
    std::size_t size() const { return static_cast<std::size_t>(n_steps) + 1; }
    double time(int i) const { return static_cast<double>(i) * step(); }

    void validate() const {
        if (!(t_max > 0.0) || !std::isfinite(t_max))
            throw contract_error("PathGrid: t_max must be positive and finite");
        if (n_steps < 1) throw contract_error("PathGrid: n_steps must be >= 1");
    }

    // Largest node index i with t_i <= t (clamped to the grid). The nudges
    // make lookups at exact node times land on that node despite rounding in
    // t/h, so interpolation there returns the stored value bitwise.
    int index_below(double t) const {
        if (t <= 0.0) return 0;
        int i = static_cast<int>(std::floor(t / step()));
        if (i > n_steps) i = n_steps;
        while (i > 0 && time(i) > t) --i;
        while (i < n_steps && time(i + 1) <= t) ++i;
        return i;
    }

    // Closest node index to t; exact node times keep their own index, and a
    // midpoint tie rounds down.
    int nearest_node(double t) const {
        if (t <= 0.0) return 0;
        const int i = index_below(t);
        if (i >= n_steps) return n_steps;
        return (t - time(i)) * 2.0 <= step() ? i : i + 1;
    }

    bool contains(double t) const { return t >= 0.0 && t <= t_max * (1.0 + 1e-12); }
};

// Linear interpolation of a node-sampled path at calendar time t.
template <class Vec>
double interp_on_grid(const PathGrid& grid, const Vec& values, double t) {
    if (!grid.contains(t))
        throw contract_error("interp_on_grid: time outside grid");
    const int i = grid.index_below(t);
    if (i >= grid.n_steps) return values[static_cast<std::size_t>(grid.n_steps)];
    const double t0 = grid.time(i);
    const double a = (t - t0) / grid.step();
    return (1.0 - a) * values[static_cast<std::size_t>(i)] +
           a * values[static_cast<std::size_t>(i) + 1];
}

// Nearest-node read of a node-sampled path. For rough paths this is the
// right off-node accessor: a linear interpolation shrinks increments (an
// interpolated Brownian read loses about a third of a step of variance),
// while the nearest node returns a true path value at a time perturbed by
// at most half a step.
template <class Vec>
double read_nearest(const PathGrid& grid, const Vec& values, double t) {
    if (!grid.contains(t))
        throw contract_error("read_nearest: time outside grid");
    return values[static_cast<std::size_t>(grid.nearest_node(t))];
}

}  // namespace tclab
