// Transform pricing for the independent case (rho = 0): the CF of the
// time-changed log return is the clock's Laplace transform evaluated at the
// characteristic exponent, E[exp(iu X_{T_t})] = L_{T_t}(psi(u)). European
// calls come out through the damped Fourier transform; Monte Carlo prices
// the same model pathwise and serves as the cross-check.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tclab/errors.hpp"
#include "tclab/levy.hpp"
#include "tclab/scenario.hpp"
#include "tclab/time_change.hpp"

namespace tclab {

/// E[exp(-lambda * T_t)] for T_t = integral of a CIR rate, as the
/// exponential-affine solution exp(A - B*v0) with gamma = sqrt(kappa^2 +
/// 2 sigma_v^2 lambda).
///
/// Numerics: gamma is the principal square root; on the admitted strip
/// Re(kappa^2 + 2 sigma_v^2 lambda) > 0, so the branch is continuous in
/// lambda from lambda = 0 and Re(gamma) > 0. Only exp(-gamma t) appears, so
/// nothing overflows for large t. The A term is evaluated through
/// w = (gamma - kappa)/(gamma + kappa) written as 2 sigma_v^2 lambda /
/// (kappa + gamma)^2, with a series for log(1+w) - log(1+w e^{-gamma t})
/// when |w| is tiny — the 2 kappa theta / sigma_v^2 prefactor would amplify
/// naive cancellation. Tiny sigma_v^2 |lambda| falls back to the
/// deterministic-clock limit.
inline std::complex<double> laplace_integrated_cir(const CirParams& p,
                                                   std::complex<double> lam, double t) {
    p.validate();
    if (!(t >= 0.0)) throw std::domain_error("laplace_integrated_cir: t must be >= 0");
    if (lam == std::complex<double>(0.0, 0.0) || t == 0.0) return {1.0, 0.0};

    const double sv2 = p.sigma_v * p.sigma_v;
    if (sv2 * std::abs(lam) < 1e-12 * p.kappa * p.kappa) {
        const double integ =
            p.theta * t + (p.v0 - p.theta) * (1.0 - std::exp(-p.kappa * t)) / p.kappa;
        return std::exp(-lam * integ);
    }
    // The transform is analytic for Re(lambda) > -kappa^2/(2 sigma_v^2);
    // admit 80% of that strip so gamma stays away from the branch cut.
    if (std::real(lam) < -0.4 * p.kappa * p.kappa / sv2)
        throw std::domain_error("laplace_integrated_cir: lambda outside analyticity strip");

    const std::complex<double> gam = std::sqrt(p.kappa * p.kappa + 2.0 * sv2 * lam);
    const std::complex<double> kg = p.kappa + gam;
    const std::complex<double> emt = std::exp(-gam * t);
    const std::complex<double> w = 2.0 * sv2 * lam / (kg * kg);
    const std::complex<double> wemt = w * emt;

    const std::complex<double> B = 2.0 * lam * (1.0 - emt) / (kg * (1.0 + wemt));
    std::complex<double> logdiff;  // log(1 + w) - log(1 + w e^{-gamma t})
    if (std::abs(w) < 1e-4) {
        const std::complex<double> w2 = w * w, e2 = wemt * wemt;
        logdiff = (w - wemt) - 0.5 * (w2 - e2) + (w * w2 - wemt * e2) / 3.0;
    } else {
        logdiff = std::log(1.0 + w) - std::log(1.0 + wemt);
    }
    const std::complex<double> A =
        (2.0 * p.kappa * p.theta / sv2) * (logdiff - sv2 * lam * t / kg);
    return std::exp(A - B * p.v0);
}

/// E[exp(iu X_{T_t})] for an independent clock. Leverage (rho != 0) breaks
/// the plain subordination identity and is rejected; the exp-BM rate has no
/// closed-form clock transform.
inline std::complex<double> cf_time_changed(const LevyParams& levy, const RateModel& clock,
                                            std::complex<double> u, double t) {
    levy.validate();
    if (levy.rho != 0.0)
        throw unsupported_model(
            "cf_time_changed: rho != 0 couples clock and core; no subordination formula");
    const std::complex<double> psi = char_exponent(levy, u);
    if (const auto* c = std::get_if<ConstantRate>(&clock)) {
        c->validate();
        return std::exp(-psi * c->level * t);
    }
    if (const auto* c = std::get_if<CirRate>(&clock))
        return laplace_integrated_cir(c->params, psi, t);
    throw unsupported_model("cf_time_changed: exp-BM rate has no closed-form transform");
}

enum class OptionKind { Call, Put };

struct OptionSpec {
    double strike = 1.0;
    double maturity = 1.0;
    OptionKind kind = OptionKind::Call;
    double spot = 1.0;
    double rate = 0.0;

    void validate() const {
        if (!(strike > 0.0)) throw contract_error("OptionSpec: strike must be > 0");
        if (!(maturity > 0.0)) throw contract_error("OptionSpec: maturity must be > 0");
        if (!(spot > 0.0)) throw contract_error("OptionSpec: spot must be > 0");
        if (!std::isfinite(rate)) throw contract_error("OptionSpec: rate must be finite");
    }
};

struct PricingConfig {
    double damping = 1.5;
    double u_max = 200.0;
    int n_quad = 4096;
    long mc_paths = 100000;
    int refinement = 4;

    void validate() const {
        if (!(damping > 1.0)) throw contract_error("PricingConfig: damping must be > 1");
        if (!(u_max > 0.0)) throw contract_error("PricingConfig: u_max must be > 0");
        if (n_quad < 16) throw contract_error("PricingConfig: n_quad must be >= 16");
        if (mc_paths < 2) throw contract_error("PricingConfig: mc_paths must be >= 2");
        if (refinement < 1) throw contract_error("PricingConfig: refinement must be >= 1");
    }
};

enum class PriceMethod { CF, MC };

struct PriceReport {
    double price = 0.0;
    PriceMethod method = PriceMethod::CF;
    double std_error = 0.0;           // MC only
    double truncation_estimate = 0.0; // CF only: quadrature + tail bound
    long n_paths = 0;                 // MC only
};

/// Damped-transform call price from a log-return CF. `cf` must return
/// E[exp(iu X_{tau})] at the option maturity, X the cumulative log return
/// over the spot (zero-rate, unit-forward convention); discounting and the
/// forward factor are applied here.
///
/// call = exp(-a k)/pi * Int_0^inf Re[e^{-ivk} e^{-r tau}
///            phi(v - i(a+1)) / (a^2 + a - v^2 + i(2a+1)v)] dv,  k = ln K,
/// phi the CF of ln S_tau under the forward measure. Trapezoid on
/// [0, u_max]; the error report combines a step-halving estimate with a
/// Gaussian-decay tail bound fitted to the last integrand samples. Puts go
/// through parity, which is exact for this transform.
inline PriceReport fourier_price(const std::function<std::complex<double>(std::complex<double>)>& cf,
                                 const OptionSpec& opt, const PricingConfig& cfg) {
    opt.validate();
    cfg.validate();
    const double a = cfg.damping;
    const double k = std::log(opt.strike);
    const double fwd_log = std::log(opt.spot) + opt.rate * opt.maturity;
    const double disc = std::exp(-opt.rate * opt.maturity);
    const int n = cfg.n_quad + (cfg.n_quad % 2);  // even, for step-halving
    const double du = cfg.u_max / n;
    const std::complex<double> i1(0.0, 1.0);

    const auto integrand = [&](double v) {
        const std::complex<double> arg = std::complex<double>(v, -(a + 1.0));
        const std::complex<double> phi = std::exp(i1 * arg * fwd_log) * cf(arg);
        const std::complex<double> denom(a * a + a - v * v, (2.0 * a + 1.0) * v);
        return std::real(std::exp(-i1 * v * k) * disc * phi / denom);
    };

    double sum_all = 0.0, sum_even = 0.0;
    double f_last = 0.0, f_prev_tail = 0.0;
    const int tail_back = n / 8;
    for (int j = 0; j <= n; ++j) {
        const double f = integrand(j * du);
        const double w = (j == 0 || j == n) ? 0.5 : 1.0;
        sum_all += w * f;
        if (j % 2 == 0) sum_even += (j == 0 || j == n) ? 0.5 * f : f;
        if (j == n) f_last = std::abs(f);
        if (j == n - tail_back) f_prev_tail = std::abs(f);
    }
    const double scale = std::exp(-a * k) / M_PI;
    const double integral = sum_all * du;
    const double integral2 = sum_even * 2.0 * du;
    const double quad_err = std::abs(integral - integral2) / 3.0 * scale;

    // |f(u)| ~ C exp(-c u^2) beyond u_max; a non-positive fit means the
    // integrand has not started decaying and the truncation is unsafe.
    const double u_hi = cfg.u_max, u_lo = cfg.u_max - tail_back * du;
    double tail = 0.0;
    if (f_last > 0.0) {
        if (f_prev_tail > f_last) {
            const double c = std::log(f_prev_tail / f_last) / (u_hi * u_hi - u_lo * u_lo);
            tail = f_last / (2.0 * c * u_hi);
        } else {
            tail = f_last * u_hi;  // no visible decay: punitive bound
        }
    }
    const double tail_scaled = tail * scale;
    if (tail_scaled > 1e-6 * opt.spot)
        throw truncation_error("fourier_price: integrand tail beyond u_max is not negligible",
                               tail_scaled);

    PriceReport rep;
    rep.method = PriceMethod::CF;
    rep.truncation_estimate = quad_err + tail_scaled;
    const double call = scale * integral;
    rep.price = opt.kind == OptionKind::Call ? call : call - opt.spot + opt.strike * disc;
    return rep;
}

/// fourier_price with the CF supplied by the model itself.
inline PriceReport cf_price(const LevyParams& levy, const RateModel& clock,
                            const OptionSpec& opt, const PricingConfig& cfg) {
    return fourier_price(
        [&](std::complex<double> u) { return cf_time_changed(levy, clock, u, opt.maturity); },
        opt, cfg);
}

namespace detail {

// Terminal log return X_{T_tau} for one path. For rho = 0 the orthogonal
// core B never has to be tracked along the way: given T_tau, B_{T_tau} is a
// single N(0, T_tau) draw (stream 1), while stream 0 drives the rate. With
// leverage the full scenario machinery is required.
inline double terminal_log_return(const ScenarioSpec& spec, double tau, std::uint64_t seed) {
    if (spec.levy.rho == 0.0) {
        const int spu = static_cast<int>(std::lround(spec.grid.n_steps / spec.grid.t_max));
        const int n = std::max(1, static_cast<int>(std::lround(tau * spu)));
        const PathGrid grid{tau, n};
        const double h = grid.step();
        const double sdt = std::sqrt(h);
        double T = 0.0;
        if (const auto* c = std::get_if<ConstantRate>(&spec.rate)) {
            T = c->level * tau;
        } else if (const auto* c = std::get_if<CirRate>(&spec.rate)) {
            double v = c->params.v0;
            double v_prev = std::max(v, 0.0);
            for (int j = 0; j < n; ++j) {
                const double z = gaussian_pair(seed, 0, static_cast<std::uint64_t>(j)).first;
                const double vp = std::max(v, 0.0);
                v += c->params.kappa * (c->params.theta - vp) * h +
                     c->params.sigma_v * std::sqrt(vp) * sdt * z;
                const double v_new = std::max(v, 0.0);
                T += 0.5 * h * (v_prev + v_new);
                v_prev = v_new;
            }
        } else {
            double w = 0.0;
            double v_prev = 1.0;  // exp(W_0 - 0) = 1
            for (int j = 0; j < n; ++j) {
                const double z = gaussian_pair(seed, 0, static_cast<std::uint64_t>(j)).first;
                w += sdt * z;
                const double s = (j + 1) * h;
                const double v_new = std::exp(w - 0.5 * s * s);
                T += 0.5 * h * (v_prev + v_new);
                v_prev = v_new;
            }
        }
        const double zb = gaussian_pair(seed, 1, 0).first;
        return spec.levy.mu * T + spec.levy.sigma * std::sqrt(T) * zb;
    }
    ScenarioSpec s = spec;
    s.grid.t_max = tau;
    s.grid.n_steps = std::max(1, static_cast<int>(std::lround(
                                      tau * spec.grid.n_steps / spec.grid.t_max)));
    const auto sc = build_scenario(s, seed);
    return sc.x_busy.back();
}

}  // namespace detail

/// Monte Carlo price of a European option under the scenario model. The
/// scenario spec's grid fixes the steps-per-unit resolution; its t_max is
/// replaced by the option maturity. Prices are computed risk-neutrally:
/// S_tau = spot * exp(r tau + X_{T_tau}) with the spec's own drift (callers
/// wanting a martingale underlier set mu = martingale_drift(sigma)).
inline PriceReport mc_price(const ScenarioSpec& spec, const OptionSpec& opt, long n_paths,
                            std::uint64_t seed) {
    spec.validate();
    opt.validate();
    if (n_paths < 2) throw contract_error("mc_price: n_paths must be >= 2");
    const double disc = std::exp(-opt.rate * opt.maturity);
    const double fwd = opt.spot / disc;
    double sum = 0.0, sumsq = 0.0;
    double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
    for (long i = 0; i < n_paths; ++i) {
        const double x =
            detail::terminal_log_return(spec, opt.maturity, derive_seed(seed, static_cast<std::uint64_t>(i)));
        const double st = fwd * std::exp(x);
        const double payoff = opt.kind == OptionKind::Call ? std::max(st - opt.strike, 0.0)
                                                           : std::max(opt.strike - st, 0.0);
        sum += payoff;
        sumsq += payoff * payoff;
        pmin = std::min(pmin, payoff);
        pmax = std::max(pmax, payoff);
    }
    PriceReport rep;
    rep.method = PriceMethod::MC;
    rep.n_paths = n_paths;
    const double mean = sum / static_cast<double>(n_paths);
    rep.price = disc * mean;
    // A degenerate sample (all payoffs identical) has exactly zero error;
    // the accumulator difference would otherwise leave rounding dust.
    const double var = pmin == pmax
                           ? 0.0
                           : std::max(0.0, (sumsq - sum * mean) / static_cast<double>(n_paths - 1));
    rep.std_error = disc * std::sqrt(var / static_cast<double>(n_paths));
    return rep;
}

struct PriceComparisonRow {
    OptionSpec option;
    double cf = 0.0;
    double mc = 0.0;
    double mc_se = 0.0;
    double z = 0.0;          // (cf - mc) / mc_se
    std::string error;       // nonempty when the CF side is unsupported
};

/// CF vs MC across a book of options, reusing one terminal-sample batch per
/// distinct maturity; with the same seed this reproduces mc_price row by row.
inline std::vector<PriceComparisonRow> compare_prices(const ScenarioSpec& spec,
                                                      std::span<const OptionSpec> options,
                                                      const PricingConfig& cfg,
                                                      std::uint64_t seed) {
    spec.validate();
    cfg.validate();
    std::vector<PriceComparisonRow> rows(options.size());
    std::vector<double> terminals;
    double current_tau = -1.0;
    for (std::size_t r = 0; r < options.size(); ++r) {
        const auto& opt = options[r];
        opt.validate();
        auto& row = rows[r];
        row.option = opt;
        if (opt.maturity != current_tau) {
            terminals.resize(static_cast<std::size_t>(cfg.mc_paths));
            for (long i = 0; i < cfg.mc_paths; ++i)
                terminals[static_cast<std::size_t>(i)] = detail::terminal_log_return(
                    spec, opt.maturity, derive_seed(seed, static_cast<std::uint64_t>(i)));
            current_tau = opt.maturity;
        }
        const double disc = std::exp(-opt.rate * opt.maturity);
        const double fwd = opt.spot / disc;
        double sum = 0.0, sumsq = 0.0;
        double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
        for (double x : terminals) {
            const double st = fwd * std::exp(x);
            const double payoff = opt.kind == OptionKind::Call
                                      ? std::max(st - opt.strike, 0.0)
                                      : std::max(opt.strike - st, 0.0);
            sum += payoff;
            sumsq += payoff * payoff;
            pmin = std::min(pmin, payoff);
            pmax = std::max(pmax, payoff);
        }
        const double mean = sum / static_cast<double>(cfg.mc_paths);
        row.mc = disc * mean;
        const double var = pmin == pmax
                               ? 0.0
                               : std::max(0.0, (sumsq - sum * mean) /
                                                   static_cast<double>(cfg.mc_paths - 1));
        row.mc_se = disc * std::sqrt(var / static_cast<double>(cfg.mc_paths));
        try {
            row.cf = cf_price(spec.levy, spec.rate, opt, cfg).price;
            const double diff = row.cf - row.mc;
            row.z = row.mc_se > 0.0 ? diff / row.mc_se
                                    : (diff == 0.0 ? 0.0
                                                   : std::numeric_limits<double>::infinity());
        } catch (const unsupported_model& e) {
            row.cf = std::numeric_limits<double>::quiet_NaN();
            row.z = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
    }
    return rows;
}

}  // namespace tclab
