#include <cmath>
#include <complex>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tclab/pricing.hpp"

using namespace tclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using C = std::complex<double>;

TEST_CASE("integrated-CIR Laplace transform basics", "[pricing]") {
    const CirParams p;
    CHECK(laplace_integrated_cir(p, 0.0, 1.0) == C(1.0, 0.0));
    CHECK(laplace_integrated_cir(p, 2.0, 0.0) == C(1.0, 0.0));

    // Real lambda: a proper Laplace transform is positive and decreasing.
    double prev = 1.0;
    for (double lam : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const auto v = laplace_integrated_cir(p, lam, 1.0);
        CHECK(v.imag() == 0.0);
        CHECK(v.real() > 0.0);
        CHECK(v.real() < prev);
        prev = v.real();
    }

    CHECK_THROWS_AS(laplace_integrated_cir(p, 1.0, -1.0), std::domain_error);
    // Outside the analyticity strip Re(lambda) > -0.4 kappa^2 / sigma_v^2.
    CHECK_THROWS_AS(laplace_integrated_cir(p, C(-20.0, 0.0), 1.0), std::domain_error);
}

TEST_CASE("Laplace transform matches direct Riccati integration", "[pricing]") {
    const CirParams p{3.0, 1.0, 0.5, 1.0};
    const std::vector<C> lams{
        {0.5, 0.0}, {2.0, 0.0}, {10.0, 0.0}, {0.02, 0.0},
        {0.5, 1.0}, {0.5, -3.0}, {-5.0, 2.0}, {0.0, 2.0},
    };
    for (const C lam : lams) {
        for (double t : {0.25, 1.0, 4.0}) {
            const C lib = laplace_integrated_cir(p, lam, t);
            const C ref = oracle::riccati_laplace_cir(p.kappa, p.theta, p.sigma_v, p.v0,
                                                      lam, t);
            // Relative: negative Re(lambda) means exponential moments, with
            // values far above 1.
            CHECK(std::abs(lib - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
        }
    }

    // Second parameter set, Feller violated: the transform is still affine.
    const CirParams q{1.0, 0.4, 1.2, 0.7};
    for (const C lam : {C{1.0, 0.0}, C{0.3, 0.8}}) {
        const C lib = laplace_integrated_cir(q, lam, 2.0);
        const C ref = oracle::riccati_laplace_cir(q.kappa, q.theta, q.sigma_v, q.v0, lam, 2.0);
        CHECK(std::abs(lib - ref) < 1e-10);
    }
}

TEST_CASE("Laplace transform is continuous into its small-parameter branches",
          "[pricing]") {
    // Tiny sigma_v^2 |lambda| switches to the deterministic-clock limit; the
    // two sides of the threshold must agree.
    const double t = 1.0;
    CirParams p;
    p.sigma_v = 1e-7;
    const auto almost = laplace_integrated_cir(p, 1.0, t);
    p.sigma_v = 0.0;
    const auto limit = laplace_integrated_cir(p, 1.0, t);
    CHECK(std::abs(almost - limit) < 1e-9);
    const double integral = p.theta * t + (p.v0 - p.theta) * (1.0 - std::exp(-p.kappa * t)) / p.kappa;
    CHECK_THAT(limit.real(), WithinRel(std::exp(-integral), 1e-14));

    // |w| below the log1p-series threshold: still matches the Riccati oracle.
    const CirParams r{3.0, 1.0, 0.01, 1.0};
    const C lam{0.05, 0.0};
    const C ref = oracle::riccati_laplace_cir(r.kappa, r.theta, r.sigma_v, r.v0, lam, t);
    CHECK(std::abs(laplace_integrated_cir(r, lam, t) - ref) < 1e-12);
}

TEST_CASE("time-changed CF: deterministic and CIR clocks", "[pricing]") {
    const LevyParams levy{martingale_drift(0.2), 0.2, 0.0};

    SECTION("constant clock is the exponential of the exponent") {
        const RateModel clock = ConstantRate{2.0};
        for (double u : {0.5, 1.0, 3.0}) {
            const C cf = cf_time_changed(levy, clock, u, 1.5);
            const C expect = std::exp(-char_exponent(levy, u) * 3.0);
            CHECK(std::abs(cf - expect) < 1e-14);
            CHECK(std::abs(cf) <= 1.0 + 1e-14);
            // Hermitian symmetry of a real-variable CF.
            const C conj_side = cf_time_changed(levy, clock, -u, 1.5);
            CHECK(std::abs(conj_side - std::conj(cf)) < 1e-14);
        }
        CHECK(std::abs(cf_time_changed(levy, clock, 0.0, 1.5) - C(1.0, 0.0)) < 1e-15);
    }
    SECTION("martingale normalization survives the time change") {
        // psi(-i) = 0 exactly under the compensated drift, so the CF at -i
        // is 1 for any independent clock.
        for (const RateModel clock : {RateModel{ConstantRate{0.7}}, RateModel{CirRate{CirParams{}}}}) {
            const C cf = cf_time_changed(levy, clock, C(0.0, -1.0), 2.0);
            CHECK(std::abs(cf - C(1.0, 0.0)) < 1e-14);
        }
    }
    SECTION("unsupported combinations are rejected") {
        LevyParams lev = levy;
        lev.rho = 0.5;
        CHECK_THROWS_AS(cf_time_changed(lev, ConstantRate{1.0}, 1.0, 1.0),
                        unsupported_model);
        CHECK_THROWS_AS(cf_time_changed(levy, ExpBmRate{}, 1.0, 1.0), unsupported_model);
    }
}

TEST_CASE("CF matches the empirical characteristic function", "[pricing]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{martingale_drift(0.2), 0.2, 0.0};
    spec.rate = CirRate{CirParams{}};
    spec.grid = PathGrid{1.0, 256};
    const double tau = 1.0;
    const long n = 20000;
    std::vector<double> xs(n);
    for (long i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] =
            tclab::detail::terminal_log_return(spec, tau, derive_seed(3000, static_cast<std::uint64_t>(i)));
    for (double u : {0.5, 1.0, 2.0}) {
        std::vector<double> re(n), im(n);
        for (long i = 0; i < n; ++i) {
            re[static_cast<std::size_t>(i)] = std::cos(u * xs[static_cast<std::size_t>(i)]);
            im[static_cast<std::size_t>(i)] = std::sin(u * xs[static_cast<std::size_t>(i)]);
        }
        const auto mre = oracle::mean_se(re);
        const auto mim = oracle::mean_se(im);
        const C cf = cf_time_changed(spec.levy, spec.rate, u, tau);
        CHECK(std::abs(cf.real() - mre.mean) < 4.0 * mre.se);
        CHECK(std::abs(cf.imag() - mim.mean) < 4.0 * mim.se);
    }
}

TEST_CASE("Fourier pricing reproduces the lognormal closed form", "[pricing]") {
    const LevyParams levy{martingale_drift(0.2), 0.2, 0.0};
    const RateModel clock = ConstantRate{1.0};
    const PricingConfig cfg;
    for (double strike : {0.9, 1.0, 1.1}) {
        for (double tau : {0.5, 1.0}) {
            const OptionSpec call{strike, tau, OptionKind::Call, 1.0, 0.0};
            const auto rep = cf_price(levy, clock, call, cfg);
            const double ref = oracle::bs_price(true, 1.0, strike, 0.0, 0.2, tau);
            CHECK_THAT(rep.price, WithinAbs(ref, 1e-9));
            CHECK(rep.truncation_estimate < 1e-6);
            CHECK(rep.truncation_estimate >= 0.0);

            const OptionSpec put{strike, tau, OptionKind::Put, 1.0, 0.0};
            const auto prep = cf_price(levy, clock, put, cfg);
            CHECK_THAT(prep.price, WithinAbs(oracle::bs_price(false, 1.0, strike, 0.0, 0.2, tau),
                                             1e-9));
            // Puts come from the call via parity, so the identity holds to
            // a couple of rounding errors, independent of quadrature.
            CHECK_THAT(rep.price - prep.price, WithinAbs(1.0 - strike, 1e-15));
        }
    }
    // At-the-money one-year reference value.
    const OptionSpec atm{1.0, 1.0, OptionKind::Call, 1.0, 0.0};
    CHECK_THAT(cf_price(levy, clock, atm, cfg).price,
               WithinAbs(0.079655674554057976, 1e-9));
}

TEST_CASE("Fourier pricing handles discounting through parity", "[pricing]") {
    const LevyParams levy{martingale_drift(0.2), 0.2, 0.0};
    const RateModel clock = ConstantRate{1.0};
    const PricingConfig cfg;
    const double r = 0.05, tau = 2.0, strike = 1.05;
    const OptionSpec call{strike, tau, OptionKind::Call, 1.0, r};
    const OptionSpec put{strike, tau, OptionKind::Put, 1.0, r};
    const auto c = cf_price(levy, clock, call, cfg);
    const auto p = cf_price(levy, clock, put, cfg);
    const double disc = std::exp(-r * tau);
    CHECK_THAT(c.price - p.price, WithinAbs(1.0 - strike * disc, 1e-15));
    CHECK_THAT(c.price, WithinAbs(oracle::bs_price(true, 1.0, strike, r, 0.2, tau), 1e-9));
}

TEST_CASE("undecayed integrands raise truncation errors", "[pricing]") {
    const LevyParams levy{martingale_drift(0.05), 0.05, 0.0};
    const RateModel clock = ConstantRate{1.0};
    PricingConfig cfg;
    cfg.u_max = 5.0;  // CF has barely moved by u = 5 at sigma = 0.05
    cfg.n_quad = 64;
    const OptionSpec opt{1.0, 0.25, OptionKind::Call, 1.0, 0.0};
    CHECK_THROWS_AS(cf_price(levy, clock, opt, cfg), truncation_error);
    try {
        cf_price(levy, clock, opt, cfg);
    } catch (const truncation_error& e) {
        CHECK(e.estimate > 1e-6);
    }
}

TEST_CASE("pricing config validation", "[pricing]") {
    PricingConfig cfg;
    cfg.damping = 1.0;
    CHECK_THROWS_AS(cfg.validate(), contract_error);
    cfg = PricingConfig{};
    cfg.n_quad = 8;
    CHECK_THROWS_AS(cfg.validate(), contract_error);
    OptionSpec opt;
    opt.strike = 0.0;
    CHECK_THROWS_AS(opt.validate(), contract_error);
}

TEST_CASE("Monte Carlo price: degenerate and lognormal cases", "[pricing]") {
    SECTION("zero vol forward payoff is deterministic with zero error") {
        ScenarioSpec spec;
        spec.levy = LevyParams{0.0, 0.0, 0.0};
        spec.rate = ConstantRate{1.0};
        const OptionSpec opt{0.9, 1.0, OptionKind::Call, 1.0, 0.0};
        const auto rep = mc_price(spec, opt, 500, 1);
        // Every path pays 1 - 0.9; the mean only wobbles by accumulation
        // rounding, and identical payoffs must report exactly zero error.
        CHECK_THAT(rep.price, WithinRel(0.1, 1e-13));
        CHECK(rep.std_error == 0.0);
        CHECK(rep.n_paths == 500);
    }
    SECTION("constant clock agrees with the closed form") {
        ScenarioSpec spec;
        spec.levy = LevyParams{martingale_drift(0.2), 0.2, 0.0};
        spec.rate = ConstantRate{1.0};
        const OptionSpec opt{1.0, 1.0, OptionKind::Call, 1.0, 0.0};
        const auto rep = mc_price(spec, opt, 20000, 5);
        const double ref = oracle::bs_price(true, 1.0, 1.0, 0.0, 0.2, 1.0);
        REQUIRE(rep.std_error > 0.0);
        CHECK(std::abs(rep.price - ref) < 4.0 * rep.std_error);
    }
    SECTION("CIR clock agrees with the transform price") {
        ScenarioSpec spec;
        spec.levy = LevyParams{martingale_drift(0.2), 0.2, 0.0};
        spec.rate = CirRate{CirParams{}};
        spec.grid = PathGrid{1.0, 256};
        const OptionSpec opt{1.0, 0.5, OptionKind::Call, 1.0, 0.0};
        const auto mc = mc_price(spec, opt, 20000, 6);
        const auto cf = cf_price(spec.levy, spec.rate, opt, PricingConfig{});
        CHECK(std::abs(cf.price - mc.price) < 4.0 * mc.std_error);
    }
    SECTION("leverage path goes through the full scenario and stays bounded") {
        ScenarioSpec spec;
        spec.levy = LevyParams{martingale_drift(0.2), 0.2, 0.7};
        spec.rate = CirRate{CirParams{}};
        spec.grid = PathGrid{1.0, 64};
        const OptionSpec opt{1.0, 1.0, OptionKind::Call, 1.0, 0.0};
        const auto rep = mc_price(spec, opt, 2000, 7);
        CHECK(rep.price > 0.0);
        CHECK(rep.price < 1.0);
        CHECK(rep.std_error > 0.0);
        const auto again = mc_price(spec, opt, 2000, 7);
        CHECK(rep.price == again.price);
    }
    SECTION("validation") {
        ScenarioSpec spec;
        const OptionSpec opt{1.0, 1.0, OptionKind::Call, 1.0, 0.0};
        CHECK_THROWS_AS(mc_price(spec, opt, 1, 1), contract_error);
    }
}

TEST_CASE("price comparison reuses the Monte Carlo batch per maturity", "[pricing]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{martingale_drift(0.2), 0.2, 0.0};
    spec.rate = CirRate{CirParams{}};
    spec.grid = PathGrid{1.0, 128};
    PricingConfig cfg;
    cfg.mc_paths = 5000;

    const std::vector<OptionSpec> opts{
        {0.9, 0.5, OptionKind::Call, 1.0, 0.0},
        {1.1, 0.5, OptionKind::Call, 1.0, 0.0},
        {1.0, 1.0, OptionKind::Put, 1.0, 0.0},
    };
    const auto rows = compare_prices(spec, opts, cfg, 42);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.error.empty());
        CHECK(std::isfinite(r.cf));
        CHECK(r.mc_se > 0.0);
        CHECK(r.z == (r.cf - r.mc) / r.mc_se);
        CHECK(std::abs(r.z) < 5.0);
    }

    // Same seed and path count: the comparison's MC column must reproduce
    // mc_price exactly.
    const auto direct = mc_price(spec, opts[2], cfg.mc_paths, 42);
    CHECK(rows[2].mc == direct.price);
    CHECK(rows[2].mc_se == direct.std_error);
}

TEST_CASE("price comparison reports unsupported transforms per row", "[pricing]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{0.0, 0.2, 0.0};
    spec.rate = ExpBmRate{};
    spec.grid = PathGrid{1.0, 64};
    PricingConfig cfg;
    cfg.mc_paths = 1000;
    const std::vector<OptionSpec> opts{{1.0, 0.5, OptionKind::Call, 1.0, 0.0}};
    const auto rows = compare_prices(spec, opts, cfg, 9);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].error.empty());
    CHECK(std::isnan(rows[0].cf));
    CHECK(std::isnan(rows[0].z));
    CHECK(std::isfinite(rows[0].mc));
}
