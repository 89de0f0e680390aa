// Stochastic clocks T_t = integral_0^t v_s ds for a nonnegative activity rate
// v, plus the inverse clock C_s = inf{t > 0 : T_t > s}. On a grid the
// crossing time is found by bracketing: the first node j with T_j > s gives
// tau in (t_{j-1}, t_j], located by linear interpolation. A flat stretch of T
// at the level resolves to the right endpoint, matching the strict inequality
// in the infimum. The duality {C_t >= s} = {T_s <= t} then holds pathwise.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "tclab/errors.hpp"
#include "tclab/grid.hpp"
#include "tclab/levy.hpp"

namespace tclab {

struct CirParams {
    double kappa = 3.0;
    double theta = 1.0;
    double sigma_v = 0.5;
    double v0 = 1.0;

    // 2*kappa*theta >= sigma_v^2 keeps the continuous process positive.
    bool feller() const { return 2.0 * kappa * theta >= sigma_v * sigma_v; }

    void validate() const {
        if (!(kappa > 0.0)) throw contract_error("CirParams: kappa must be > 0");
        if (!(theta > 0.0)) throw contract_error("CirParams: theta must be > 0");
        if (!(sigma_v >= 0.0)) throw contract_error("CirParams: sigma_v must be >= 0");
        if (!(v0 >= 0.0)) throw contract_error("CirParams: v0 must be >= 0");
    }
};

struct ConstantRate {
    double level = 1.0;
    void validate() const {
        if (!(level >= 0.0) || !std::isfinite(level))
            throw contract_error("ConstantRate: level must be >= 0 and finite");
    }
};

// v_s = exp(W_s - s^2/2) driven by the same W as the price core.
struct ExpBmRate {};

struct CirRate {
    CirParams params;
};

using RateModel = std::variant<ConstantRate, CirRate, ExpBmRate>;

struct ActivityPath {
    PathGrid grid;
    std::vector<double> v;
};

struct TimeChangePath {
    PathGrid grid;
    std::vector<double> values;  // T_{t_i}, nondecreasing, T_0 = 0

    double back() const { return values.back(); }
    double at(double t) const { return interp_on_grid(grid, values, t); }
};

// Inverse clock sampled on a grid of levels: C[j] = crossing time of level[j].
// Entries may be +infinity when the level is never exceeded on the grid.
struct CrossingCurve {
    std::vector<double> levels;
    std::vector<double> values;
};

namespace detail {

inline void check_driver(const PathGrid& grid, std::span<const double> w,
                         const char* who) {
    grid.validate();
    if (w.size() != grid.size()) throw shape_error(std::string(who) + ": driver length does not match grid");
}

}  // namespace detail

// Full-truncation Euler for dv = kappa*(theta - v) dt + sigma_v*sqrt(v) dW:
// the drift and diffusion both see v^+ and the stored path is floored at 0,
// so every output entry is nonnegative even with a violated Feller condition.
inline ActivityPath simulate_cir(const CirParams& p, const PathGrid& grid,
                                 std::span<const double> w) {
    p.validate();
    detail::check_driver(grid, w, "simulate_cir");
    ActivityPath out{grid, std::vector<double>(grid.size())};
    const double h = grid.step();
    double v = p.v0;  // working state; may dip below 0 between flooring
    out.v[0] = std::max(v, 0.0);
    for (int i = 0; i < grid.n_steps; ++i) {
        const double vp = std::max(v, 0.0);
        const double dw = w[static_cast<std::size_t>(i) + 1] - w[static_cast<std::size_t>(i)];
        v += p.kappa * (p.theta - vp) * h + p.sigma_v * std::sqrt(vp) * dw;
        out.v[static_cast<std::size_t>(i) + 1] = std::max(v, 0.0);
    }
    return out;
}

inline ActivityPath exp_bm_rate(const PathGrid& grid, std::span<const double> w) {
    detail::check_driver(grid, w, "exp_bm_rate");
    ActivityPath out{grid, std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const double s = grid.time(static_cast<int>(i));
        out.v[i] = std::exp(w[i] - 0.5 * s * s);
    }
    return out;
}

inline ActivityPath rate_path(const RateModel& model, const PathGrid& grid,
                              std::span<const double> w) {
    return std::visit(
        [&](const auto& m) -> ActivityPath {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, ConstantRate>) {
                m.validate();
                grid.validate();
                return ActivityPath{grid, std::vector<double>(grid.size(), m.level)};
            } else if constexpr (std::is_same_v<M, CirRate>) {
                return simulate_cir(m.params, grid, w);
            } else {
                return exp_bm_rate(grid, w);
            }
        },
        model);
}

// Trapezoidal cumulative integral of the rate; exact for piecewise-linear v.
inline TimeChangePath integrate_rate(const ActivityPath& rate) {
    rate.grid.validate();
    if (rate.v.size() != rate.grid.size())
        throw shape_error("integrate_rate: rate length does not match grid");
    for (double x : rate.v)
        if (!(x >= 0.0)) throw std::domain_error("integrate_rate: negative rate entry");
    TimeChangePath out{rate.grid, std::vector<double>(rate.grid.size())};
    const double h = rate.grid.step();
    out.values[0] = 0.0;
    for (std::size_t i = 1; i < out.values.size(); ++i)
        out.values[i] = out.values[i - 1] + 0.5 * h * (rate.v[i - 1] + rate.v[i]);
    return out;
}

namespace detail {

// First index j >= lo with values[j] > level, or -1. `lo` lets sweeps over
// sorted levels resume where the previous search ended.
inline int first_exceedance(const std::vector<double>& values, double level, int lo) {
    for (std::size_t j = static_cast<std::size_t>(std::max(lo, 1)); j < values.size(); ++j)
        if (values[j] > level) return static_cast<int>(j);
    return -1;
}

inline double interp_crossing(const PathGrid& grid, const std::vector<double>& values,
                              double level, int j) {
    const double lo = values[static_cast<std::size_t>(j) - 1];
    const double hi = values[static_cast<std::size_t>(j)];
    const double a = (level - lo) / (hi - lo);  // hi > level >= lo, so hi > lo
    return grid.time(j - 1) + a * grid.step();
}

}  // namespace detail

// inf{t > 0 : T_t > level} located on the grid; +infinity when the level is
// not exceeded by T_{t_max}.
inline double crossing_time(const TimeChangePath& clock, double level) {
    if (!(level >= 0.0)) throw std::domain_error("crossing_time: level must be >= 0");
    const int j = detail::first_exceedance(clock.values, level, 1);
    if (j < 0) return std::numeric_limits<double>::infinity();
    return detail::interp_crossing(clock.grid, clock.values, level, j);
}

inline CrossingCurve crossing_curve(const TimeChangePath& clock,
                                    std::span<const double> levels) {
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (!(levels[i] <= levels[i + 1]))
            throw contract_error("crossing_curve: levels must be sorted ascending");
    if (!levels.empty() && !(levels[0] >= 0.0))
        throw std::domain_error("crossing_curve: levels must be >= 0");
    CrossingCurve out;
    out.levels.assign(levels.begin(), levels.end());
    out.values.resize(levels.size());
    int hint = 1;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const int j = detail::first_exceedance(clock.values, levels[i], hint);
        if (j < 0) {
            const double inf = std::numeric_limits<double>::infinity();
            for (std::size_t k = i; k < levels.size(); ++k) out.values[k] = inf;
            return out;
        }
        out.values[i] = detail::interp_crossing(clock.grid, clock.values, levels[i], j);
        hint = j;  // levels ascend, so the next exceedance is at or after j
    }
    return out;
}

// Reconstructs T on the level grid from a finite, strictly increasing C by
// swapping axes: the crossing of C at calendar level s is T_s. Beyond the
// last inverse sample the reconstruction clamps to the top level.
inline TimeChangePath invert_crossing(const CrossingCurve& curve, const PathGrid& out_grid) {
    out_grid.validate();
    if (curve.levels.size() != curve.values.size() || curve.levels.size() < 2)
        throw shape_error("invert_crossing: curve needs matching levels/values, >= 2 entries");
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        if (!std::isfinite(curve.values[i]))
            throw contract_error("invert_crossing: crossing values must be finite");
        if (i > 0 && !(curve.values[i] > curve.values[i - 1]))
            throw contract_error("invert_crossing: crossing values must be strictly increasing");
    }
    TimeChangePath out{out_grid, std::vector<double>(out_grid.size())};
    std::size_t j = 1;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double s = out_grid.time(static_cast<int>(i));
        while (j + 1 < curve.values.size() && !(curve.values[j] > s)) ++j;
        if (!(curve.values[j] > s)) {
            out.values[i] = curve.levels.back();
            continue;
        }
        const double c0 = curve.values[j - 1];
        const double c1 = curve.values[j];
        const double a = std::clamp((s - c0) / (c1 - c0), 0.0, 1.0);
        out.values[i] = curve.levels[j - 1] + a * (curve.levels[j] - curve.levels[j - 1]);
    }
    return out;
}

struct MeanReport {
    double t = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    int n_paths = 0;
};

// Monte Carlo estimate of E[T_t] from independent rate paths. For the
// rescaled clocks used here the target is t itself.
inline MeanReport check_unconditional_mean(const RateModel& model, double t, int n_paths,
                                           std::uint64_t seed, int steps_per_unit = 256) {
    if (!(t > 0.0)) throw std::domain_error("check_unconditional_mean: t must be > 0");
    if (n_paths < 2) throw contract_error("check_unconditional_mean: n_paths must be >= 2");
    PathGrid grid{t, std::max(1, static_cast<int>(std::ceil(t * steps_per_unit)))};
    double sum = 0.0, sumsq = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < n_paths; ++k) {
        const auto pair = simulate_brownian_pair(grid, derive_seed(seed, static_cast<std::uint64_t>(k)));
        const auto clock = integrate_rate(rate_path(model, grid, pair.w));
        const double x = clock.back();
        sum += x;
        sumsq += x * x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    MeanReport rep;
    rep.t = t;
    rep.n_paths = n_paths;
    rep.mean = sum / n_paths;
    // Deterministic clocks give identical samples; report exactly zero error
    // instead of accumulator rounding dust.
    const double var =
        lo == hi ? 0.0 : std::max(0.0, (sumsq - sum * sum / n_paths) / (n_paths - 1));
    rep.std_error = std::sqrt(var / n_paths);
    return rep;
}

}  // namespace tclab
