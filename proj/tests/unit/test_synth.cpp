#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "llab/core/stats.hpp"
#include "llab/liquidity/liquidity.hpp"
#include "llab/market_data/market_data.hpp"
#include "llab/synth/synth.hpp"

using namespace llab;
using namespace llab::synth;

TEST_CASE("tick scenarios are deterministic in the seed") {
    TickScenario sc;
    sc.kind = ScenarioKind::kLiquidityRegimes;
    sc.n_days = 2;
    sc.seed = 5;
    auto a = generate_ticks(sc, "AAA");
    auto b = generate_ticks(sc, "AAA");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ts_ms == b[i].ts_ms);
        CHECK(a[i].price == b[i].price);
        CHECK(a[i].amount == b[i].amount);
    }
    sc.seed = 6;
    auto c = generate_ticks(sc, "AAA");
    CHECK(a[100].price != c[100].price);
}

TEST_CASE("tick scenario covers full days plus the seed tick") {
    TickScenario sc;
    sc.n_days = 3;
    sc.seed = 9;
    auto ticks = generate_ticks(sc, "AAA");
    CHECK(ticks.size() == static_cast<std::size_t>(3 * kMinutesPerDay + 1));
    auto bars = market_data::aggregate_minutes(ticks);
    auto built = market_data::build_day_panels(bars);
    CHECK(built.panels.size() == 3);          // seed-tick day dropped
    CHECK(built.dropped_partial_days == 1);
}

TEST_CASE("constant-liquidity scenario pins beta at one through the pipeline") {
    TickScenario sc;
    sc.kind = ScenarioKind::kConstantLiquidity;
    sc.n_days = 3;
    sc.seed = 11;
    auto ticks = generate_ticks(sc, "AAA");
    auto bars = market_data::aggregate_minutes(ticks);
    market_data::WashPolicy off;
    off.enabled = false;
    bars = market_data::apply_wash_treatment(std::move(bars), off);
    auto built = market_data::build_day_panels(bars);
    REQUIRE(built.panels.size() == 3);
    for (const auto& panel : built.panels) {
        auto day = liquidity::process_day(panel, KeyedRng(1), 10.0);
        REQUIRE(day.usable);
        CHECK(day.zero_returns_fixed == 0);
        CHECK(day.record.beta_tt == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(day.record.r_lq_tt == doctest::Approx(day.record.r_tt).epsilon(1e-9));
        for (const auto& m : day.minutes) {
            CHECK(m.beta_t == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("heavy-tail scenario produces dispersed amounts") {
    TickScenario sc;
    sc.kind = ScenarioKind::kHeavyTailAmounts;
    sc.amount_sigma = 1.5;
    sc.n_days = 2;
    sc.seed = 13;
    auto ticks = generate_ticks(sc, "AAA");
    std::vector<double> amounts;
    for (const auto& t : ticks) amounts.push_back(t.amount);
    Describe d = describe(amounts);
    CHECK(d.std > d.mean);  // lognormal sigma 1.5 is strongly right-skewed
}

TEST_CASE("scenario names round trip") {
    for (auto k : {ScenarioKind::kConstantLiquidity, ScenarioKind::kLiquidityRegimes,
                   ScenarioKind::kHeavyTailAmounts}) {
        CHECK(parse_scenario(scenario_name(k)) == k);
    }
    CHECK_THROWS_AS(parse_scenario("nope"), std::invalid_argument);
}

TEST_CASE("scenario validation") {
    TickScenario sc;
    sc.n_days = 0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    DailyMarketScenario dm;
    dm.garch_a = 0.5;
    dm.garch_b = 0.6;
    CHECK_THROWS_AS(dm.validate(), std::invalid_argument);
}

TEST_CASE("daily market generator shape and determinism") {
    DailyMarketScenario sc;
    sc.assets = {"X1", "X2", "X3"};
    sc.n_days = 120;
    sc.seed = 21;
    auto m1 = generate_daily_market(sc);
    auto m2 = generate_daily_market(sc);
    REQUIRE(m1.records.size() == 3);
    REQUIRE(m1.records[0].size() == 120);
    for (std::size_t a = 0; a < 3; ++a) {
        for (int d = 0; d < 120; ++d) {
            CHECK(m1.records[a][d].r_tt == m2.records[a][d].r_tt);
            CHECK(m1.records[a][d].beta_tt == m2.records[a][d].beta_tt);
            // construction identity: observed = beta * adjusted
            CHECK(m1.records[a][d].r_tt ==
                  doctest::Approx(m1.records[a][d].beta_tt * m1.records[a][d].r_lq_tt));
            CHECK(m1.records[a][d].beta_tt > 0.0);
            CHECK(m1.records[a][d].beta_tt <= sc.beta_cap);
            CHECK(m1.amount_raw[a][d] > m1.records[a][d].amount_tt);
        }
    }
}

TEST_CASE("daily market betas are positively skewed with spikes") {
    DailyMarketScenario sc;
    sc.assets = {"X1"};
    sc.n_days = 4000;
    sc.seed = 22;
    auto m = generate_daily_market(sc);
    std::vector<double> beta;
    for (const auto& r : m.records[0]) beta.push_back(r.beta_tt);
    Describe d = describe(beta);
    CHECK(d.mean > d.median);
    int capped = 0;
    for (double b : beta) capped += b >= sc.beta_cap ? 1 : 0;
    double frac = static_cast<double>(capped) / beta.size();
    CHECK(frac > 0.005);
    CHECK(frac < 0.08);
}
