// Look-ahead trading on a slow clock. At calendar t the inverse clock may
// satisfy C_t > t + hold; on that event the enlarged view already contains
// the price core W out to business time T_{t+hold} <= t, so the component
// rho*W of the move from t to t+hold is foreseeable. The lookahead arm
// trades its sign; the natural arm is a matched control that trades at the
// same times using only the sign of the last observed return. Trades execute
// on grid nodes, which makes the rho = 1 dominance exact rather than
// statistical: the foreseeable component then *is* the booked log return.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tclab/errors.hpp"
#include "tclab/filtration.hpp"
#include "tclab/rng.hpp"
#include "tclab/scenario.hpp"

namespace tclab {

struct TradeRecord {
    double entry_time = 0.0;
    double exit_time = 0.0;
    int direction = 0;  // +1 long, -1 short
    double entry_price = 0.0;
    double exit_price = 0.0;
    double pnl = 0.0;
};

struct StrategyLedger {
    std::vector<TradeRecord> trades;
    double total_pnl = 0.0;
    int n_opportunities = 0;  // gate passes (== executed trades)
    int n_skipped = 0;        // check times whose exit falls off the horizon
};

namespace detail {

// Stream ids under a scenario seed. Stream 0 belongs to the Brownian pair;
// measurability continuations take 3 and up.
inline constexpr std::uint64_t kTieStreamLookahead = 1;
inline constexpr std::uint64_t kTieStreamNatural = 2;

inline int snap_to_node(const PathGrid& grid, double t) {
    const int i = static_cast<int>(std::lround(t / grid.step()));
    return std::clamp(i, 0, grid.n_steps);
}

inline int tie_break(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
    return uniform_pair(seed, stream, block).first < 0.5 ? 1 : -1;
}

inline void book(StrategyLedger& led, const MarketScenario& sc, int it, int ie, int dir) {
    TradeRecord tr;
    tr.entry_time = sc.grid().time(it);
    tr.exit_time = sc.grid().time(ie);
    tr.direction = dir;
    tr.entry_price = sc.prices[static_cast<std::size_t>(it)];
    tr.exit_price = sc.prices[static_cast<std::size_t>(ie)];
    tr.pnl = dir * (tr.exit_price - tr.entry_price);
    led.total_pnl += tr.pnl;
    led.trades.push_back(tr);
}

// Gate: the opportunity {C_t > t + hold} evaluated through the equivalent
// event {T_{t+hold} <= t}, which avoids touching infinite grid crossings.
inline bool opportunity(const MarketScenario& sc, int it, int ie) {
    return sc.clock.values[static_cast<std::size_t>(ie)] <= sc.grid().time(it);
}

}  // namespace detail

inline StrategyLedger lookahead_strategy(const MarketScenario& sc,
                                         std::span<const double> check_times, double hold) {
    if (!(hold > 0.0)) throw contract_error("lookahead_strategy: hold must be > 0");
    const auto& grid = sc.grid();
    StrategyLedger led;
    for (std::size_t k = 0; k < check_times.size(); ++k) {
        const int it = detail::snap_to_node(grid, check_times[k]);
        const double exit_t = grid.time(it) + hold;
        if (exit_t > grid.t_max * (1.0 + 1e-12)) {
            ++led.n_skipped;
            continue;
        }
        const int ie = detail::snap_to_node(grid, exit_t);
        if (!detail::opportunity(sc, it, ie)) continue;
        ++led.n_opportunities;

        const auto info = detail::make_enlarged_info(sc, grid.time(it),
                                                     crossing_time(sc.clock, grid.time(it)));
        const double t_now = info.clock_at(grid.time(it));
        const double t_exit = info.clock_at(grid.time(ie));
        // Foreseeable component of log S_{t+hold} - log S_t; at rho = 1 this
        // equals the full log return, term for term.
        const double f = (sc.spec.levy.mu * t_exit +
                          sc.spec.levy.sigma * (sc.spec.levy.rho * info.w_at(t_exit))) -
                         (sc.spec.levy.mu * t_now +
                          sc.spec.levy.sigma * (sc.spec.levy.rho * info.w_at(t_now)));
        const int dir = f > 0.0   ? 1
                        : f < 0.0 ? -1
                                  : detail::tie_break(sc.seed, detail::kTieStreamLookahead, k);
        detail::book(led, sc, it, ie, dir);
    }
    return led;
}

inline StrategyLedger natural_strategy(const MarketScenario& sc,
                                       std::span<const double> check_times, double hold) {
    if (!(hold > 0.0)) throw contract_error("natural_strategy: hold must be > 0");
    const auto& grid = sc.grid();
    StrategyLedger led;
    for (std::size_t k = 0; k < check_times.size(); ++k) {
        const int it = detail::snap_to_node(grid, check_times[k]);
        const double exit_t = grid.time(it) + hold;
        if (exit_t > grid.t_max * (1.0 + 1e-12)) {
            ++led.n_skipped;
            continue;
        }
        const int ie = detail::snap_to_node(grid, exit_t);
        if (!detail::opportunity(sc, it, ie)) continue;
        ++led.n_opportunities;

        // Only the observed price history up to t is admissible here.
        InformationSet info;
        info.calendar_time = grid.time(it);
        info.observed_returns_until = grid.time(it);
        info.w_known_until = 0.0;  // no W access under the natural view
        info.scenario = &sc;
        const int ip = detail::snap_to_node(grid, grid.time(it) - hold);
        const double r = std::log(info.observed_price(grid.time(it))) -
                         std::log(info.observed_price(grid.time(ip)));
        const int dir = r > 0.0   ? 1
                        : r < 0.0 ? -1
                                  : detail::tie_break(sc.seed, detail::kTieStreamNatural, k);
        detail::book(led, sc, it, ie, dir);
    }
    return led;
}

struct ArmStats {
    double mean_pnl = 0.0;
    double se = 0.0;      // standard error of the per-scenario total pnl mean
    double t_stat = 0.0;
    long n_trades = 0;
    long n_opportunities = 0;
};

struct ArbitrageConfig {
    RateModel rate = ExpBmRate{};
    std::vector<double> rho_grid = {0.0, 0.5, 1.0};
    int n_scenarios = 1000;
    std::uint64_t seed = 1;
    double horizon = 10.0;
    double hold = 1.0;
    double sigma = 0.1;
    std::optional<double> mu;  // default: martingale drift for sigma
    int steps_per_unit = 256;
    double s0 = 1.0;
    int refinement = 4;

    void validate() const {
        if (rho_grid.empty()) throw config_error("arbitrage: rho_grid must be nonempty");
        for (double r : rho_grid)
            if (!(r >= -1.0 && r <= 1.0)) throw config_error("arbitrage: rho outside [-1, 1]");
        if (n_scenarios < 1) throw config_error("arbitrage: n_scenarios must be >= 1");
        if (!(horizon > hold) || !(hold > 0.0))
            throw config_error("arbitrage: need horizon > hold > 0");
        if (!(sigma >= 0.0)) throw config_error("arbitrage: sigma must be >= 0");
        if (steps_per_unit < 1) throw config_error("arbitrage: steps_per_unit must be >= 1");
    }

    double drift() const {
        if (mu) return *mu;
        return sigma > 0.0 ? martingale_drift(sigma) : 0.0;
    }
};

struct ScenarioTrade {
    int scenario = 0;
    TradeRecord trade;
};

struct ArmResult {
    ArmStats stats;
    std::vector<ScenarioTrade> trades;
};

struct RhoResult {
    double rho = 0.0;
    ArmResult lookahead;
    ArmResult natural;
    bool dominance = true;  // lookahead total >= natural total on every scenario
};

struct ArbitrageReport {
    ArbitrageConfig config;
    std::vector<RhoResult> results;
};

namespace detail {

inline void finalize_arm(ArmResult& arm, const std::vector<double>& per_scenario_pnl) {
    const auto n = static_cast<double>(per_scenario_pnl.size());
    double sum = 0.0, ss = 0.0;
    for (double x : per_scenario_pnl) sum += x;
    const double mean = sum / n;
    for (double x : per_scenario_pnl) ss += (x - mean) * (x - mean);
    arm.stats.mean_pnl = mean;
    arm.stats.se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    arm.stats.t_stat = arm.stats.se > 0.0 ? mean / arm.stats.se : 0.0;
}

}  // namespace detail

// Both arms over matched scenario seeds for each rho: scenario i always uses
// derive_seed(config.seed, i), so rho comparisons see identical driving noise.
inline ArbitrageReport run_arbitrage_experiment(const ArbitrageConfig& cfg) {
    cfg.validate();
    ArbitrageReport rep;
    rep.config = cfg;

    std::vector<double> checks;
    for (double t = 0.0; t + cfg.hold <= cfg.horizon + 1e-12; t += 1.0) checks.push_back(t);

    ScenarioSpec spec;
    spec.rate = cfg.rate;
    spec.grid = PathGrid{cfg.horizon,
                         static_cast<int>(std::lround(cfg.horizon * cfg.steps_per_unit))};
    spec.s0 = cfg.s0;
    spec.refinement = cfg.refinement;
    spec.levy.sigma = cfg.sigma;
    spec.levy.mu = cfg.drift();

    for (double rho : cfg.rho_grid) {
        spec.levy.rho = rho;
        RhoResult rr;
        rr.rho = rho;
        std::vector<double> pnl_look(static_cast<std::size_t>(cfg.n_scenarios));
        std::vector<double> pnl_nat(static_cast<std::size_t>(cfg.n_scenarios));
        for (int i = 0; i < cfg.n_scenarios; ++i) {
            const auto sc = build_scenario(spec, derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            const auto look = lookahead_strategy(sc, checks, cfg.hold);
            const auto nat = natural_strategy(sc, checks, cfg.hold);
            pnl_look[static_cast<std::size_t>(i)] = look.total_pnl;
            pnl_nat[static_cast<std::size_t>(i)] = nat.total_pnl;
            rr.lookahead.stats.n_trades += static_cast<long>(look.trades.size());
            rr.lookahead.stats.n_opportunities += look.n_opportunities;
            rr.natural.stats.n_trades += static_cast<long>(nat.trades.size());
            rr.natural.stats.n_opportunities += nat.n_opportunities;
            if (look.total_pnl < nat.total_pnl) rr.dominance = false;
            for (const auto& tr : look.trades) rr.lookahead.trades.push_back({i, tr});
            for (const auto& tr : nat.trades) rr.natural.trades.push_back({i, tr});
        }
        detail::finalize_arm(rr.lookahead, pnl_look);
        detail::finalize_arm(rr.natural, pnl_nat);
        rep.results.push_back(std::move(rr));
    }
    return rep;
}

}  // namespace tclab
