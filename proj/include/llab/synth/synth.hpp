// synth.hpp - deterministic synthetic market scenarios.
//
// Two levels of generator share one seed-keyed random stream:
//  - tick scenarios emit trade files that drive the ingestion pipeline
//    end to end (one trade per minute, price path + traded amount);
//  - the daily market generator emits ready-made daily records for
//    backtest experiments, with returns produced as beta_t * adjusted
//    return where the adjusted return follows AR(1) with GARCH(1,1)
//    innovations and beta follows a sticky lognormal process with
//    occasional extreme-liquidity spikes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llab/core/dates.hpp"
#include "llab/liquidity/liquidity.hpp"
#include "llab/market_data/market_data.hpp"

namespace llab::synth {

enum class ScenarioKind {
    kConstantLiquidity,  // per-minute amount proportional to |return|
    kLiquidityRegimes,   // heavy-trading blocks on a few days
    kHeavyTailAmounts,   // lognormal amounts, plain returns
};

ScenarioKind parse_scenario(const std::string& name);  // "constant"|"regimes"|"heavytail"
std::string scenario_name(ScenarioKind k);

struct TickScenario {
    ScenarioKind kind = ScenarioKind::kLiquidityRegimes;
    std::vector<std::string> assets = {"AAA"};
    int n_days = 30;
    EpochDay start_day = 18100;  // 2019-07-24
    std::uint64_t seed = 1;
    double base_price = 100.0;
    double minute_vol = 8e-4;       // per-minute return scale
    double amount_scale = 1000.0;   // typical minute amount in quote units
    double amount_sigma = 1.2;      // lognormal dispersion (>= 1.5 for heavy tails)
    double regime_prob = 0.04;      // heavy-trading day probability
    double regime_amount_factor = 120.0;
    double regime_drift = 0.0025;   // signed per-minute drift inside the block
    int regime_block_minutes = 120;

    void validate() const;
};

// One CSV per asset at <out_dir>/<asset>_ticks.csv; returns the paths.
std::vector<std::string> generate_tick_files(const TickScenario& sc, const std::string& out_dir);

// In-memory variant used by tests: ticks for one asset.
std::vector<market_data::TickRecord> generate_ticks(const TickScenario& sc,
                                                    const std::string& asset);

struct DailyMarketScenario {
    std::vector<std::string> assets = {"A1", "A2", "A3", "A4", "A5", "A6"};
    int n_days = 480;
    EpochDay start_day = 18377;  // 2020-04-26
    std::uint64_t seed = 1;
    double ar_coeff = 0.35;        // AR(1) coefficient of the adjusted return
    double mu_low = 0.0;           // per-asset mean levels spread on [mu_low, mu_high]
    double mu_high = 0.0016;
    double daily_vol = 0.02;       // unconditional daily return scale
    double garch_a = 0.08;
    double garch_b = 0.88;
    double beta_log_rho = 0.6;     // stickiness of log beta
    double beta_log_sigma = 0.5;
    double beta_spike_prob = 0.030;
    double beta_spike_log_mean = 2.6;  // spike level in log space (pre-cap)
    double beta_cap = 10.0;
    double amount_scale = 1e6;

    void validate() const;
};

struct DailyMarket {
    std::vector<std::string> assets;
    std::vector<EpochDay> dates;
    // Indexed [asset][day].
    std::vector<std::vector<liquidity::DailyLiquidityRecord>> records;
    std::vector<std::vector<double>> amount_raw;  // pre-treatment daily amounts
};

DailyMarket generate_daily_market(const DailyMarketScenario& sc);

}  // namespace llab::synth
