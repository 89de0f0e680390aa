// CSV/file output: fixed headers, 17-significant-digit decimals (value-
// preserving for doubles), and atomic writes (temp file + rename) so outputs
// exist only when an experiment finished.
#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tclab/errors.hpp"
#include "tclab/levy.hpp"
#include "tclab/pricing.hpp"
#include "tclab/scenario.hpp"
#include "tclab/strategy.hpp"
#include "tclab/time_change.hpp"

namespace tclab {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace detail {

// Row indices 0, stride, 2*stride, ..., always including the final node.
inline std::vector<int> stride_rows(int n_steps, int stride) {
    std::vector<int> rows;
    for (int i = 0; i <= n_steps; i += stride) rows.push_back(i);
    if (rows.back() != n_steps) rows.push_back(n_steps);
    return rows;
}

}  // namespace detail

inline std::string brownian_pair_csv(const BrownianPair& pair, int stride = 1) {
    std::string s = "t,w,b\n";
    for (int i : detail::stride_rows(pair.grid.n_steps, stride)) {
        const auto k = static_cast<std::size_t>(i);
        s += format_double(pair.grid.time(i)) + "," + format_double(pair.w[k]) + "," +
             format_double(pair.b[k]) + "\n";
    }
    return s;
}

inline std::string clock_csv(const ActivityPath& rate, const TimeChangePath& clock,
                             int stride = 1) {
    if (rate.v.size() != clock.values.size())
        throw shape_error("clock_csv: rate and clock must share a grid");
    std::string s = "t,v,T\n";
    for (int i : detail::stride_rows(clock.grid.n_steps, stride)) {
        const auto k = static_cast<std::size_t>(i);
        s += format_double(clock.grid.time(i)) + "," + format_double(rate.v[k]) + "," +
             format_double(clock.values[k]) + "\n";
    }
    return s;
}

inline std::string crossing_csv(const CrossingCurve& curve) {
    std::string s = "level,C\n";
    for (std::size_t i = 0; i < curve.levels.size(); ++i)
        s += format_double(curve.levels[i]) + "," + format_double(curve.values[i]) + "\n";
    return s;
}

inline std::string scenario_csv(const MarketScenario& sc, int stride = 1) {
    std::string s = "t,w,b,v,T,S\n";
    const int ref = sc.spec.refinement;
    for (int i : detail::stride_rows(sc.grid().n_steps, stride)) {
        const auto k = static_cast<std::size_t>(i);
        const auto kf = k * static_cast<std::size_t>(ref);
        s += format_double(sc.grid().time(i)) + "," + format_double(sc.pair.w[kf]) + "," +
             format_double(sc.pair.b[kf]) + "," + format_double(sc.rate.v[k]) + "," +
             format_double(sc.clock.values[k]) + "," + format_double(sc.prices[k]) + "\n";
    }
    return s;
}

inline std::string ledger_csv(const std::vector<ScenarioTrade>& trades) {
    std::string s = "scenario,entry_t,exit_t,direction,entry_price,exit_price,pnl\n";
    for (const auto& st : trades) {
        const auto& tr = st.trade;
        s += std::to_string(st.scenario) + "," + format_double(tr.entry_time) + "," +
             format_double(tr.exit_time) + "," + (tr.direction > 0 ? "long" : "short") + "," +
             format_double(tr.entry_price) + "," + format_double(tr.exit_price) + "," +
             format_double(tr.pnl) + "\n";
    }
    return s;
}

inline std::string price_comparison_csv(const std::vector<PriceComparisonRow>& rows) {
    std::string s = "strike,maturity,kind,cf_price,mc_price,mc_se,z\n";
    for (const auto& r : rows) {
        s += format_double(r.option.strike) + "," + format_double(r.option.maturity) + "," +
             (r.option.kind == OptionKind::Call ? "call" : "put") + "," +
             format_double(r.cf) + "," + format_double(r.mc) + "," + format_double(r.mc_se) +
             "," + format_double(r.z) + "\n";
    }
    return s;
}

}  // namespace tclab
