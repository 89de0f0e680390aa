// Base process X_t = mu*t + sigma*(rho*W_t + sqrt(1-rho^2)*B_t) built from a
// correlated Brownian pair. W doubles as the driver of the activity rate, so
// rho controls leverage between the clock and the price innovations.
//
// Characteristic exponent convention: E[exp(i u X_t)] = exp(-t psi(u)) with
// psi(u) = -i*mu*u + sigma^2 u^2 / 2.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "tclab/errors.hpp"
#include "tclab/grid.hpp"
#include "tclab/rng.hpp"

namespace tclab {

struct LevyParams {
    double mu = 0.0;
    double sigma = 0.2;
    double rho = 0.0;

    void validate() const {
        if (!std::isfinite(mu)) throw contract_error("LevyParams: mu must be finite");
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw contract_error("LevyParams: sigma must be >= 0");
        if (!(rho >= -1.0 && rho <= 1.0))
            throw contract_error("LevyParams: rho must lie in [-1, 1]");
    }
};

inline std::complex<double> char_exponent(const LevyParams& p, std::complex<double> u) {
    const std::complex<double> i(0.0, 1.0);
    return -i * p.mu * u + 0.5 * p.sigma * p.sigma * u * u;
}

// Drift making exp(X_t) a martingale: psi(-i) = 0.
inline double martingale_drift(double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("martingale_drift: sigma must be > 0");
    return -0.5 * sigma * sigma;
}

// Two independent standard Brownian paths on a shared grid. Each grid step i
// consumes exactly one counter block (stream 0 of the seed), so a path can be
// extended to a longer horizon without re-simulating or perturbing the prefix.
struct BrownianPair {
    PathGrid grid;
    std::vector<double> w;
    std::vector<double> b;
    std::uint64_t seed = 0;
};

inline BrownianPair simulate_brownian_pair(const PathGrid& grid, std::uint64_t seed) {
    grid.validate();
    BrownianPair out;
    out.grid = grid;
    out.seed = seed;
    out.w.resize(grid.size());
    out.b.resize(grid.size());
    out.w[0] = 0.0;
    out.b[0] = 0.0;
    const double sdt = std::sqrt(grid.step());
    for (int i = 0; i < grid.n_steps; ++i) {
        const auto [zw, zb] = gaussian_pair(seed, 0, static_cast<std::uint64_t>(i));
        out.w[static_cast<std::size_t>(i) + 1] = out.w[static_cast<std::size_t>(i)] + sdt * zw;
        out.b[static_cast<std::size_t>(i) + 1] = out.b[static_cast<std::size_t>(i)] + sdt * zb;
    }
    return out;
}

// Grows the pair in place until t_max >= new_t_max, keeping the step size.
// Existing nodes are untouched; new increments continue the block counter.
inline void extend_brownian_pair(BrownianPair& pair, double new_t_max) {
    const double h = pair.grid.step();
    const double sdt = std::sqrt(h);
    while (pair.grid.t_max < new_t_max) {
        const int i = pair.grid.n_steps;
        const auto [zw, zb] = gaussian_pair(pair.seed, 0, static_cast<std::uint64_t>(i));
        pair.w.push_back(pair.w.back() + sdt * zw);
        pair.b.push_back(pair.b.back() + sdt * zb);
        pair.grid.n_steps = i + 1;
        pair.grid.t_max = h * static_cast<double>(i + 1);
    }
}

// X sampled at the pair's own grid times (identity clock).
inline std::vector<double> build_levy_path(const BrownianPair& pair, const LevyParams& p) {
    p.validate();
    if (pair.w.size() != pair.grid.size() || pair.b.size() != pair.grid.size())
        throw shape_error("build_levy_path: pair arrays do not match grid");
    const double orth = std::sqrt(1.0 - p.rho * p.rho);
    std::vector<double> x(pair.grid.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = pair.grid.time(static_cast<int>(i));
        x[i] = p.mu * t + p.sigma * (p.rho * pair.w[i] + orth * pair.b[i]);
    }
    return x;
}

}  // namespace tclab
