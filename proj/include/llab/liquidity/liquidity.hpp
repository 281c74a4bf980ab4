// liquidity.hpp - minute and daily liquidity measures.
//
// For each trading day, minute returns and traded amounts are combined into
// a normalized illiquidity series ell_t = (|r_t|/mean|r|) / (A_t/mean A),
// rescaled so it sums to the number of minutes in the day. Its inverse
// square root is the minute liquidity premium beta; dividing the observed
// return by beta gives the liquidity-adjusted return. Daily aggregates
// (returns, betas, intraday variances) feed the model-fitting and backtest
// stages.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llab/core/dates.hpp"
#include "llab/core/rng.hpp"
#include "llab/market_data/market_data.hpp"

namespace llab::liquidity {

struct MinuteLiquidity {
    double ell_t = 0;   // normalized minute illiquidity, > 0
    double ell_T = 0;   // day-normalized illiquidity, > 0, sums to T over the day
    double beta_t = 0;  // 1/sqrt(ell_T); > 1 high liquidity, < 1 low
    double r_lq = 0;    // liquidity-adjusted minute return, r / beta_t
};

struct DailyLiquidityRecord {
    std::string asset;
    EpochDay date = 0;
    double r_tt = 0;        // daily return, sum of minute returns
    double r_lq_tt = 0;     // daily liquidity-adjusted return
    double beta_tt = 0;     // |r_tt / r_lq_tt|, capped
    double var_tt = 0;      // T x population variance of minute returns
    double var_lq_tt = 0;   // same for the adjusted series
    double eta_t = 0;       // daily normalization factor
    double amount_tt = 0;   // treated daily amount
    bool beta_capped = false;
};

struct ZeroFixResult {
    std::vector<double> returns;
    std::size_t fixed_count = 0;
};

// Replaces each exact-zero return with sign * u * 1e-2 * mean_abs, u uniform
// on [0.5, 1), drawn from a per-minute substream of `day_stream` so results
// do not depend on evaluation order. Requires mean_abs > 0.
ZeroFixResult fix_zero_returns(std::span<const double> returns, double mean_abs,
                               const KeyedRng& day_stream);

struct IlliquidityResult {
    std::vector<double> ell;
    std::size_t zero_amounts_substituted = 0;
};

// ell_t over one day. Requires every |r_t| > 0 (run the zero fix first).
// Zero-amount minutes get the day's minimum positive amount scaled by 1e-2;
// a day with no positive amount is unusable (throws std::invalid_argument).
IlliquidityResult minute_illiquidity(std::span<const double> fixed_returns,
                                     std::span<const double> amounts);

struct DayNormalization {
    double eta = 0;
    std::vector<double> ell_T;
};

// eta = T / sum(ell); ell_T = eta * ell, so sum(ell_T) == T.
DayNormalization day_normalize(std::span<const double> ell);

std::vector<MinuteLiquidity> minute_beta_and_adjusted_return(std::span<const double> fixed_returns,
                                                             const std::vector<double>& ell,
                                                             const DayNormalization& norm);

// Daily aggregates. beta_cap bounds |r_tt / r_lq_tt|; a zero adjusted daily
// return is reported at the cap and flagged.
DailyLiquidityRecord daily_aggregate(const std::vector<MinuteLiquidity>& minutes,
                                     std::span<const double> fixed_returns,
                                     double beta_cap = 10.0);

// Two algebraic routes to the day's liquidity-weighted variance; they agree
// to rounding and are kept separate so either can cross-check the other.
double weighted_day_variance(std::span<const double> ell_T, std::span<const double> returns);
double adjusted_day_variance_scaled_mean(std::span<const double> ell_T,
                                         std::span<const double> returns);

struct DayLiquidity {
    bool usable = false;
    std::string reason;  // set when unusable
    DailyLiquidityRecord record;
    std::vector<MinuteLiquidity> minutes;
    std::size_t zero_returns_fixed = 0;
    std::size_t zero_amounts_substituted = 0;
};

// Full per-day computation from a treated day panel. `stream` must already
// be forked for the run; the asset/date substream is derived internally.
DayLiquidity process_day(const market_data::DayPanel& panel, const KeyedRng& stream,
                         double beta_cap = 10.0);

// Daily record CSV (header: asset,date,r_tt,r_lq_tt,beta_tt,var_tt,var_lq_tt,eta_t,amount_tt).
void write_daily_record_csv(const std::string& path,
                            const std::vector<DailyLiquidityRecord>& records);
std::vector<DailyLiquidityRecord> read_daily_record_csv(const std::string& path);

}  // namespace llab::liquidity
