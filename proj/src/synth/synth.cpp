#include "llab/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "llab/arga/garch.hpp"
#include "llab/core/csv.hpp"

namespace llab::synth {

ScenarioKind parse_scenario(const std::string& name) {
    if (name == "constant") return ScenarioKind::kConstantLiquidity;
    if (name == "regimes") return ScenarioKind::kLiquidityRegimes;
    if (name == "heavytail") return ScenarioKind::kHeavyTailAmounts;
    throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::kConstantLiquidity: return "constant";
        case ScenarioKind::kLiquidityRegimes: return "regimes";
        case ScenarioKind::kHeavyTailAmounts: return "heavytail";
    }
    return "?";
}

void TickScenario::validate() const {
    if (assets.empty()) throw std::invalid_argument("scenario needs at least one asset");
    if (n_days < 1) throw std::invalid_argument("scenario needs at least one day");
    if (!(minute_vol > 0.0) || !(amount_scale > 0.0) || !(base_price > 0.0)) {
        throw std::invalid_argument("scenario scales must be positive");
    }
    if (regime_block_minutes < 1 || regime_block_minutes > kMinutesPerDay) {
        throw std::invalid_argument("regime block must fit in a day");
    }
}

std::vector<market_data::TickRecord> generate_ticks(const TickScenario& sc,
                                                    const std::string& asset) {
    sc.validate();
    KeyedRng root = KeyedRng(sc.seed).fork("ticks").fork(asset);

    std::vector<market_data::TickRecord> ticks;
    ticks.reserve(static_cast<std::size_t>(sc.n_days) * kMinutesPerDay + 1);

    auto emit = [&](std::int64_t slot, double price, double amount) {
        market_data::TickRecord t;
        t.asset = asset;
        t.ts_ms = slot * kMsPerMinute;
        t.price = price;
        t.qty = amount / price;
        t.amount = amount;
        ticks.push_back(std::move(t));
    };

    // Seed tick on the minute before the sample so the first full day has a
    // previous close; its partial day is dropped by the panel builder.
    const std::int64_t first_slot = sc.start_day * kMinutesPerDay;
    emit(first_slot - 1, sc.base_price, sc.amount_scale);

    double prev_price = sc.base_price;
    for (int d = 0; d < sc.n_days; ++d) {
        KeyedRng day_rng = root.fork(static_cast<std::uint64_t>(d));

        bool regime = false;
        int block_start = 0;
        double drift = 0.0;
        if (sc.kind == ScenarioKind::kLiquidityRegimes) {
            KeyedRng rg = day_rng.fork("regime");
            regime = rg.next_double() < sc.regime_prob;
            block_start =
                static_cast<int>(rg.uniform(0.0, kMinutesPerDay - sc.regime_block_minutes));
            drift = rg.sign() * sc.regime_drift;
        }

        for (int m = 0; m < kMinutesPerDay; ++m) {
            KeyedRng mr = day_rng.fork(static_cast<std::uint64_t>(m));
            double z = mr.normal();
            // Returns bounded away from exact zero: the aggregated bars then
            // never need the zero-return fix on full days.
            double r = (z >= 0 ? 1.0 : -1.0) * std::max(std::abs(z), 0.05) * sc.minute_vol;
            bool in_block =
                regime && m >= block_start && m < block_start + sc.regime_block_minutes;
            if (in_block) r = drift + 0.3 * r;  // directional move carried by the heavy block

            double price = prev_price * (1.0 + r);
            // Recompute the return exactly as the aggregator will see it so
            // that amount-vs-return couplings hold at machine precision.
            double r_seen = (price - prev_price) / prev_price;

            double amount;
            switch (sc.kind) {
                case ScenarioKind::kConstantLiquidity:
                    amount = sc.amount_scale * std::abs(r_seen) / sc.minute_vol;
                    break;
                case ScenarioKind::kLiquidityRegimes:
                    amount = sc.amount_scale * std::exp(sc.amount_sigma * mr.normal());
                    if (in_block) amount *= sc.regime_amount_factor;
                    break;
                case ScenarioKind::kHeavyTailAmounts:
                default:
                    amount = sc.amount_scale * std::exp(sc.amount_sigma * mr.normal());
                    break;
            }

            emit(first_slot + static_cast<std::int64_t>(d) * kMinutesPerDay + m, price, amount);
            prev_price = price;
        }
    }
    return ticks;
}

std::vector<std::string> generate_tick_files(const TickScenario& sc, const std::string& out_dir) {
    std::vector<std::string> paths;
    for (const auto& asset : sc.assets) {
        auto ticks = generate_ticks(sc, asset);
        std::string path = out_dir + "/" + asset + "_ticks.csv";
        CsvWriter w(path, "asset,ts_ms,price,qty,amount");
        for (const auto& t : ticks) {
            w.write_row({t.asset, format_i64(t.ts_ms), format_double(t.price),
                         format_double(t.qty), format_double(t.amount)});
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

void DailyMarketScenario::validate() const {
    if (assets.empty() || n_days < 10) throw std::invalid_argument("daily scenario too small");
    if (!(daily_vol > 0.0) || !(beta_cap > 0.0)) {
        throw std::invalid_argument("daily scenario scales must be positive");
    }
    if (!(garch_a + garch_b < 1.0)) throw std::invalid_argument("garch process not stationary");
    if (std::abs(ar_coeff) >= 1.0) throw std::invalid_argument("ar process not stationary");
}

DailyMarket generate_daily_market(const DailyMarketScenario& sc) {
    sc.validate();
    DailyMarket mkt;
    mkt.assets = sc.assets;
    mkt.dates.resize(sc.n_days);
    for (int d = 0; d < sc.n_days; ++d) mkt.dates[d] = sc.start_day + d;

    KeyedRng root = KeyedRng(sc.seed).fork("daily-market");
    const double uncond_var = sc.daily_vol * sc.daily_vol;
    arga::GarchParams gp{uncond_var * (1.0 - sc.garch_a - sc.garch_b), sc.garch_a, sc.garch_b};

    const int n_assets = static_cast<int>(sc.assets.size());
    mkt.records.resize(n_assets);
    mkt.amount_raw.resize(n_assets);

    for (int a = 0; a < n_assets; ++a) {
        KeyedRng ar = root.fork(sc.assets[a]);
        KeyedRng r_eps = ar.fork("eps");
        KeyedRng r_beta = ar.fork("beta");
        KeyedRng r_amt = ar.fork("amount");

        const double mu =
            sc.mu_low + (sc.mu_high - sc.mu_low) *
                            (n_assets > 1 ? static_cast<double>(a) / (n_assets - 1) : 0.5);

        double s2 = uncond_var;
        double eps_prev = 0.0;
        double r_lq_prev = mu;
        double log_beta = 0.0;

        auto& rec = mkt.records[a];
        auto& raw = mkt.amount_raw[a];
        rec.resize(sc.n_days);
        raw.resize(sc.n_days);

        for (int d = 0; d < sc.n_days; ++d) {
            s2 = arga::garch_forecast(gp, eps_prev, s2, arga::VolMode::kStandard, 1.0);
            double eps = std::sqrt(s2) * r_eps.normal();
            double r_lq = mu + sc.ar_coeff * (r_lq_prev - mu) + eps;
            eps_prev = eps;
            r_lq_prev = r_lq;

            log_beta = sc.beta_log_rho * log_beta + sc.beta_log_sigma * r_beta.normal();
            double beta_raw = std::exp(log_beta);
            if (r_beta.next_double() < sc.beta_spike_prob) {
                beta_raw = std::exp(sc.beta_spike_log_mean + 0.4 * r_beta.normal());
            }
            bool capped = beta_raw > sc.beta_cap;
            double beta = capped ? sc.beta_cap : std::max(beta_raw, 0.02);

            auto& rr = rec[d];
            rr.asset = sc.assets[a];
            rr.date = mkt.dates[d];
            rr.r_lq_tt = r_lq;
            rr.r_tt = beta * r_lq;
            rr.beta_tt = beta;
            rr.beta_capped = capped;
            rr.eta_t = 1.0;
            rr.var_tt = rr.r_tt * rr.r_tt + s2;  // order-of-magnitude intraday variance
            rr.var_lq_tt = r_lq * r_lq + s2;
            // liquid days trade more; amounts ride beta with lognormal noise
            double amt = sc.amount_scale * std::exp(0.8 * std::log(std::max(beta, 0.05)) +
                                                    0.6 * r_amt.normal());
            raw[d] = amt / 0.4;  // pre-treatment level, roughly 40% retained
            rr.amount_tt = amt;
        }
    }
    return mkt;
}

}  // namespace llab::synth
