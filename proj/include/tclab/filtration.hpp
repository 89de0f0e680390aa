// Filtrations rendered operationally: an InformationSet is a view over one
// scenario with hard observability extents, and every accessor enforces its
// extent (reads past it throw). The enlarged view at calendar time t knows W
// up to C_t and the price path up to t. Whether C_t is knowable from the
// clock's own history alone is probed by measurability_test: resimulate
// futures from the time-t Markov state and look at the conditional spread of
// the crossing time. Positive spread falsifies history-measurability; it
// never proves it.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tclab/errors.hpp"
#include "tclab/scenario.hpp"
#include "tclab/time_change.hpp"

namespace tclab {

enum class TimeClass { Determined, Undetermined };

// Determined iff T_t >= t: the crossing C_t <= t already lies in observed
// history. Boundary T_t = t counts as Determined.
inline TimeClass classify_time(const TimeChangePath& clock, double t) {
    if (!clock.grid.contains(t)) throw contract_error("classify_time: t outside grid");
    return clock.at(t) >= t ? TimeClass::Determined : TimeClass::Undetermined;
}

struct InformationSet {
    double calendar_time = 0.0;
    double w_known_until = 0.0;          // C_{calendar_time}
    double observed_returns_until = 0.0; // price path extent (= calendar_time)
    const MarketScenario* scenario = nullptr;

    // Instrumentation: audit trail of the widest read each accessor served.
    mutable long n_reads = 0;
    mutable double max_w_query = 0.0;
    mutable double max_price_query = 0.0;

    double w_at(double u) const {
        ++n_reads;
        max_w_query = std::max(max_w_query, u);
        if (!(u <= w_known_until))
            throw access_violation("InformationSet: W read at " + std::to_string(u) +
                                   " beyond extent " + std::to_string(w_known_until));
        return scenario->w_at(u);
    }

    double observed_price(double u) const {
        ++n_reads;
        max_price_query = std::max(max_price_query, u);
        if (!(u <= observed_returns_until))
            throw access_violation("InformationSet: price read beyond calendar time");
        return price_at(*scenario, u);
    }

    // T_u is a functional of the W path to u for W-driven rates, so clock
    // reads obey the W extent; a deterministic rate has no such restriction.
    double clock_at(double u) const {
        ++n_reads;
        if (!std::holds_alternative<ConstantRate>(scenario->spec.rate) && !(u <= w_known_until))
            throw access_violation("InformationSet: clock read beyond W extent");
        return scenario->clock.at(u);
    }
};

namespace detail {

// Extent-clamped construction shared with the strategies: an infinite C_t on
// the grid means every simulated W value is inside the enlarged view.
inline InformationSet make_enlarged_info(const MarketScenario& sc, double t, double c) {
    InformationSet info;
    info.calendar_time = t;
    info.observed_returns_until = t;
    info.w_known_until = std::isinf(c) ? sc.pair.grid.t_max : c;
    info.scenario = &sc;
    return info;
}

}  // namespace detail

inline InformationSet enlarged_info(const MarketScenario& sc, double t) {
    if (!sc.grid().contains(t)) throw contract_error("enlarged_info: t outside grid");
    const double c = crossing_time(sc.clock, t);
    if (std::isinf(c))
        throw horizon_error("enlarged_info: clock never exceeds t on the simulated grid",
                            sc.grid().t_max);
    return detail::make_enlarged_info(sc, t, c);
}

struct MeasurabilityOptions {
    int steps_per_unit = 256;
    double horizon = 0.0;  // continuation length; 0 = auto (4t + 4)
};

struct MeasurabilityReport {
    double t = 0.0;
    double clock_value = 0.0;   // T_t at the conditioning time
    double rate_state = 0.0;    // v_t (CIR/constant) or W_t (exp-BM rate)
    TimeClass classification = TimeClass::Determined;
    int n_continuations = 0;
    std::vector<double> crossing_samples;
    int n_censored = 0;
    bool censor_flag = false;   // > 1% of continuations censored
    double dispersion = 0.0;    // sample std dev of uncensored crossings
};

namespace detail {

struct ContinuationState {
    double v = 0.0;   // CIR state
    double w = 0.0;   // BM level for exp-BM rate
    double s = 0.0;   // calendar time
};

inline double continue_rate(const RateModel& model, ContinuationState& st, double h,
                            double z) {
    if (const auto* cir = std::get_if<CirRate>(&model)) {
        const double vp = std::max(st.v, 0.0);
        st.v += cir->params.kappa * (cir->params.theta - vp) * h +
                cir->params.sigma_v * std::sqrt(vp) * std::sqrt(h) * z;
        st.s += h;
        return std::max(st.v, 0.0);
    }
    if (std::holds_alternative<ExpBmRate>(model)) {
        st.w += std::sqrt(h) * z;
        st.s += h;
        return std::exp(st.w - 0.5 * st.s * st.s);
    }
    st.s += h;
    return std::get<ConstantRate>(model).level;
}

}  // namespace detail

// One history to time t, then (if the crossing is still in the future)
// n_continuations independent resimulations from the time-t state, each run
// until the clock exceeds level t. Streams 3+k keep continuations disjoint
// from the history draw.
inline MeasurabilityReport measurability_test(const RateModel& model, double t,
                                              std::uint64_t base_seed, int n_continuations,
                                              MeasurabilityOptions opt = {}) {
    if (!(t > 0.0)) throw std::domain_error("measurability_test: t must be > 0");
    if (n_continuations < 2)
        throw contract_error("measurability_test: n_continuations must be >= 2");
    const int n = std::max(1, static_cast<int>(std::ceil(t * opt.steps_per_unit)));
    const PathGrid grid{t, n};
    const double h = grid.step();
    const auto pair = simulate_brownian_pair(grid, base_seed);
    const auto rate = rate_path(model, grid, pair.w);
    const auto clock = integrate_rate(rate);

    MeasurabilityReport rep;
    rep.t = t;
    rep.clock_value = clock.back();
    rep.rate_state = std::holds_alternative<ExpBmRate>(model) ? pair.w.back() : rate.v.back();
    rep.n_continuations = n_continuations;
    rep.classification = rep.clock_value >= t ? TimeClass::Determined : TimeClass::Undetermined;

    if (rep.classification == TimeClass::Determined) {
        rep.crossing_samples.push_back(crossing_time(clock, t));
        rep.dispersion = 0.0;
        return rep;
    }

    const double horizon = opt.horizon > 0.0 ? opt.horizon : 4.0 * t + 4.0;
    const long max_steps = static_cast<long>(std::ceil(horizon / h));
    for (int k = 0; k < n_continuations; ++k) {
        detail::ContinuationState st{rate.v.back(), pair.w.back(), t};
        double v_prev = rate.v.back();
        double acc = rep.clock_value;
        double found = std::numeric_limits<double>::quiet_NaN();
        for (long j = 0; j < max_steps; ++j) {
            const double z = gaussian_pair(base_seed, 3 + static_cast<std::uint64_t>(k),
                                           static_cast<std::uint64_t>(j)).first;
            const double v_new = detail::continue_rate(model, st, h, z);
            const double acc_new = acc + 0.5 * h * (v_prev + v_new);
            if (acc_new > t) {
                found = (st.s - h) + h * (t - acc) / (acc_new - acc);
                break;
            }
            acc = acc_new;
            v_prev = v_new;
        }
        if (std::isnan(found))
            ++rep.n_censored;
        else
            rep.crossing_samples.push_back(found);
    }
    rep.censor_flag = rep.n_censored > 0.01 * n_continuations;

    const auto& xs = rep.crossing_samples;
    if (xs.size() >= 2) {
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        rep.dispersion = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return rep;
}

}  // namespace tclab
