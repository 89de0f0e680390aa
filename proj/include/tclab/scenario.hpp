// One simulated market: a Brownian pair on a refined grid, the activity rate
// and clock driven by the calendar-time samples of W, and the asset
// S_t = s0 * exp(X_{T_t}) read off at business times T_t. The same W path is
// used both as the rate driver (calendar time) and inside X (business time);
// the refined grid is extended past t_max whenever T_{t_max} > t_max so every
// business-time read stays on simulated ground.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tclab/errors.hpp"
#include "tclab/grid.hpp"
#include "tclab/levy.hpp"
#include "tclab/time_change.hpp"

namespace tclab {

struct ScenarioSpec {
    LevyParams levy;
    RateModel rate = ConstantRate{1.0};
    PathGrid grid{1.0, 256};
    double s0 = 1.0;
    int refinement = 4;  // pair-grid steps per calendar step

    void validate() const {
        levy.validate();
        grid.validate();
        if (!(s0 > 0.0)) throw contract_error("ScenarioSpec: s0 must be > 0");
        if (refinement < 1) throw contract_error("ScenarioSpec: refinement must be >= 1");
    }
};

struct MarketScenario {
    ScenarioSpec spec;
    std::uint64_t seed = 0;
    BrownianPair pair;            // refined grid, possibly longer than spec.grid
    ActivityPath rate;            // on spec.grid
    TimeChangePath clock;         // on spec.grid
    std::vector<double> x_busy;   // X_{T_{t_i}} on spec.grid
    std::vector<double> prices;   // S_{t_i} on spec.grid

    const PathGrid& grid() const { return spec.grid; }

    // Business-time reads resolve to the nearest refined node: interpolated
    // Brownian increments understate quadratic variation by an amount that
    // does not shrink with the calendar step, so the off-node convention is
    // nearest-node, shared by the scenario builder and every strategy read.
    double w_at(double tau) const { return read_nearest(pair.grid, pair.w, tau); }
    double b_at(double tau) const { return read_nearest(pair.grid, pair.b, tau); }

    // W/B at calendar node i of the coarse grid (exact refined node, no interp).
    double w_calendar(int i) const {
        return pair.w[static_cast<std::size_t>(i) * static_cast<std::size_t>(spec.refinement)];
    }
};

namespace detail {

inline std::vector<double> calendar_subsample(const BrownianPair& pair, int refinement,
                                              int n_coarse) {
    std::vector<double> out(static_cast<std::size_t>(n_coarse) + 1);
    for (int i = 0; i <= n_coarse; ++i)
        out[static_cast<std::size_t>(i)] =
            pair.w[static_cast<std::size_t>(i) * static_cast<std::size_t>(refinement)];
    return out;
}

}  // namespace detail

inline MarketScenario build_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    MarketScenario sc;
    sc.spec = spec;
    sc.seed = seed;

    const PathGrid fine{spec.grid.t_max, spec.grid.n_steps * spec.refinement};
    sc.pair = simulate_brownian_pair(fine, seed);

    const auto w_cal = detail::calendar_subsample(sc.pair, spec.refinement, spec.grid.n_steps);
    sc.rate = rate_path(spec.rate, spec.grid, w_cal);
    sc.clock = integrate_rate(sc.rate);

    // Business-time reads need W and B out to T_{t_max}; 10% headroom keeps
    // later reads off the very last node.
    const double need = std::max(spec.grid.t_max, 1.1 * sc.clock.back());
    extend_brownian_pair(sc.pair, need);

    const double orth = std::sqrt(std::max(0.0, 1.0 - spec.levy.rho * spec.levy.rho));
    sc.x_busy.resize(spec.grid.size());
    sc.prices.resize(spec.grid.size());
    for (std::size_t i = 0; i < sc.x_busy.size(); ++i) {
        const double ti = sc.clock.values[i];
        sc.x_busy[i] = spec.levy.mu * ti +
                       spec.levy.sigma * (spec.levy.rho * sc.w_at(ti) + orth * sc.b_at(ti));
        sc.prices[i] = spec.s0 * std::exp(sc.x_busy[i]);
    }
    return sc;
}

inline MarketScenario build_scenario(const LevyParams& levy, const RateModel& rate,
                                     const PathGrid& grid, double s0, std::uint64_t seed,
                                     int refinement = 4) {
    return build_scenario(ScenarioSpec{levy, rate, grid, s0, refinement}, seed);
}

// Price at calendar time t, log-linear between grid nodes.
inline double price_at(const MarketScenario& sc, double t) {
    if (!sc.grid().contains(t))
        throw std::domain_error("price_at: time outside scenario grid");
    return sc.spec.s0 * std::exp(interp_on_grid(sc.grid(), sc.x_busy, t));
}

struct RealizedVarianceReport {
    PathGrid grid;
    std::vector<double> qv;           // cumulative sum of squared log returns
    double scale = 0.0;               // 1/sigma^2 mapping qv to clock units
    std::vector<double> recovered;    // scale * qv
    double sup_distance = 0.0;        // sup_i |recovered_i - T_i|
};

// Realized quadratic variation of log S recovers the clock up to the factor
// sigma^2: qv_t -> sigma^2 * T_t as the grid refines.
inline RealizedVarianceReport realized_qv(const MarketScenario& sc) {
    RealizedVarianceReport rep;
    rep.grid = sc.grid();
    rep.qv.resize(sc.grid().size());
    rep.qv[0] = 0.0;
    for (std::size_t i = 1; i < rep.qv.size(); ++i) {
        const double d = sc.x_busy[i] - sc.x_busy[i - 1];
        rep.qv[i] = rep.qv[i - 1] + d * d;
    }
    const double s2 = sc.spec.levy.sigma * sc.spec.levy.sigma;
    rep.scale = s2 > 0.0 ? 1.0 / s2 : 0.0;
    rep.recovered.resize(rep.qv.size());
    for (std::size_t i = 0; i < rep.qv.size(); ++i) {
        rep.recovered[i] = rep.scale * rep.qv[i];
        rep.sup_distance = std::max(rep.sup_distance,
                                    std::abs(rep.recovered[i] - sc.clock.values[i]));
    }
    return rep;
}

}  // namespace tclab
