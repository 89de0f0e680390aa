#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tclab/scenario.hpp"

using namespace tclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("scenario spec validation", "[scenario]") {
    ScenarioSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.s0 = 0.0;
    CHECK_THROWS_AS(spec.validate(), contract_error);
    spec.s0 = 1.0;
    spec.refinement = 0;
    CHECK_THROWS_AS(spec.validate(), contract_error);
}

TEST_CASE("unit constant clock reduces to the plain Levy path", "[scenario]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{-0.02, 0.2, 0.0};
    spec.rate = ConstantRate{1.0};
    spec.grid = PathGrid{1.0, 256};
    const auto sc = build_scenario(spec, 42);

    // T_t = t exactly on the dyadic grid, and business-time reads of W and B
    // land on stored fine-grid nodes, so prices match the direct formula
    // without tolerance.
    for (int i = 0; i <= spec.grid.n_steps; ++i) {
        const auto k = static_cast<std::size_t>(i);
        CHECK(sc.clock.values[k] == spec.grid.time(i));
        const auto kf = k * 4;  // refinement 4
        const double x = -0.02 * spec.grid.time(i) + 0.2 * sc.pair.b[kf];
        CHECK(sc.x_busy[k] == x);
        CHECK(sc.prices[k] == std::exp(x));
    }
    CHECK(sc.prices[0] == 1.0);
}

TEST_CASE("degenerate sigma gives a deterministic exponential price path", "[scenario]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{0.05, 0.0, 0.0};
    spec.rate = ConstantRate{1.0};
    spec.grid = PathGrid{1.0, 64};
    const auto sc = build_scenario(spec, 1);
    for (int i = 0; i <= 64; ++i)
        CHECK_THAT(sc.prices[static_cast<std::size_t>(i)],
                   WithinRel(std::exp(0.05 * spec.grid.time(i)), 1e-14));

    // No diffusion: qv carries only the drift's (mu dT)^2 per step, and the
    // 1/sigma^2 rescale is pinned to zero rather than infinity.
    const auto rep = realized_qv(sc);
    CHECK_THAT(rep.qv.back(), WithinRel(0.05 * 0.05 / 64.0, 1e-9));
    CHECK(rep.scale == 0.0);
    for (double r : rep.recovered) CHECK(r == 0.0);
}

TEST_CASE("pair is extended far enough for business-time reads", "[scenario]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{0.0, 0.2, 0.5};
    spec.rate = ExpBmRate{};
    spec.grid = PathGrid{2.0, 256};
    const auto sc = build_scenario(spec, 3);
    CHECK(sc.pair.grid.t_max >= spec.grid.t_max);
    CHECK(sc.pair.grid.t_max >= 1.1 * sc.clock.back() - 1e-9);

    // The refined prefix is untouched by the extension.
    const PathGrid fine{2.0, 256 * 4};
    const auto base = simulate_brownian_pair(fine, 3);
    for (std::size_t i = 0; i < base.w.size(); ++i) {
        CHECK(sc.pair.w[i] == base.w[i]);
        CHECK(sc.pair.b[i] == base.b[i]);
    }
}

TEST_CASE("scenario is deterministic in (spec, seed)", "[scenario]") {
    ScenarioSpec spec;
    spec.rate = CirRate{CirParams{}};
    spec.levy.rho = 0.3;
    const auto a = build_scenario(spec, 17);
    const auto b = build_scenario(spec, 17);
    CHECK(a.prices == b.prices);
    CHECK(a.clock.values == b.clock.values);
    const auto c = build_scenario(spec, 18);
    CHECK(a.prices != c.prices);
}

TEST_CASE("spot price is a martingale under the compensated drift", "[scenario]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{martingale_drift(0.2), 0.2, 0.0};
    spec.rate = CirRate{CirParams{}};
    spec.grid = PathGrid{1.0, 64};
    const int n = 2000;
    std::vector<double> terminal(n);
    for (int i = 0; i < n; ++i)
        terminal[static_cast<std::size_t>(i)] =
            build_scenario(spec, derive_seed(500, static_cast<std::uint64_t>(i))).prices.back();
    const auto ms = oracle::mean_se(terminal);
    CHECK(std::abs(ms.mean - 1.0) < 4.0 * ms.se);
}

TEST_CASE("price_at interpolates log-linearly and rejects out-of-range reads",
          "[scenario]") {
    ScenarioSpec spec;
    spec.rate = CirRate{CirParams{}};
    const auto sc = build_scenario(spec, 9);
    const auto& g = sc.grid();

    for (int i : {0, 1, 100, 256}) CHECK(price_at(sc, g.time(i)) == sc.prices[static_cast<std::size_t>(i)]);

    const double mid = 0.5 * (g.time(10) + g.time(11));
    const double expect = std::exp(0.5 * (sc.x_busy[10] + sc.x_busy[11]));
    CHECK_THAT(price_at(sc, mid), WithinRel(expect, 1e-13));

    CHECK_THROWS_AS(price_at(sc, -0.01), std::domain_error);
    CHECK_THROWS_AS(price_at(sc, 1.01), std::domain_error);
}

TEST_CASE("realized quadratic variation recovers the clock", "[scenario]") {
    ScenarioSpec spec;
    spec.levy = LevyParams{0.0, 0.2, 0.0};
    spec.rate = ConstantRate{1.0};
    spec.grid = PathGrid{1.0, 4096};
    spec.refinement = 1;
    const auto sc = build_scenario(spec, 12);
    const auto rep = realized_qv(sc);
    CHECK_THAT(rep.scale, WithinRel(25.0, 1e-14));  // 1 / 0.2^2
    // sup |QV/sigma^2 - T| concentrates around sqrt(2h); allow a generous
    // multiple for the fixed seed.
    CHECK(rep.sup_distance < 6.0 * std::sqrt(2.0 * spec.grid.step()));
    CHECK(rep.qv.back() > 0.0);
    CHECK(rep.recovered.back() == rep.scale * rep.qv.back());
}

TEST_CASE("qv error shrinks when the observation grid refines", "[scenario]") {
    ScenarioSpec coarse;
    coarse.levy = LevyParams{0.0, 0.2, 0.0};
    coarse.rate = ConstantRate{1.0};
    coarse.grid = PathGrid{1.0, 64};
    coarse.refinement = 1;

    ScenarioSpec fine = coarse;
    fine.grid = PathGrid{1.0, 4096};

    // Average sup distance over seeds; the ratio should reflect roughly
    // h^(1/2) scaling (factor 8 in h gives ~sqrt(64) = 8).
    double sc_sum = 0.0, sf_sum = 0.0;
    const int m = 40;
    for (int i = 0; i < m; ++i) {
        const auto s = derive_seed(7000, static_cast<std::uint64_t>(i));
        sc_sum += realized_qv(build_scenario(coarse, s)).sup_distance;
        sf_sum += realized_qv(build_scenario(fine, s)).sup_distance;
    }
    CHECK(sc_sum / sf_sum > 3.0);  // ideal ratio 8, demand at least 3
}
