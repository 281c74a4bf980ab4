// backtest.hpp - rolling-window out-of-sample experiment over eight
// portfolio rules.
//
// Portfolios 1-4 are benchmark weightings (equal, amount, beta, inverse
// beta) over yesterday's state. Portfolios 5/6 solve the mean-variance
// program on trailing-window moments of regular / adjusted returns;
// portfolios 7/8 replace the mean vector with one-step model forecasts
// (standard / liquidity-adjusted). Decisions at day t only see data up to
// t; performance is always realized on regular returns at t+1.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llab/arga/adf.hpp"
#include "llab/arga/model.hpp"
#include "llab/core/dates.hpp"
#include "llab/liquidity/liquidity.hpp"
#include "llab/market_data/market_data.hpp"
#include "llab/portfolio/portfolio.hpp"

namespace llab::backtest {

struct AssetSeries {
    std::string asset;
    // Aligned with BacktestData::dates; NaN marks a missing asset-day.
    std::vector<double> r;           // daily regular return
    std::vector<double> r_lq;        // daily liquidity-adjusted return
    std::vector<double> beta;        // daily liquidity premium beta
    std::vector<double> var_tt;      // intraday variance, regular
    std::vector<double> var_lq_tt;   // intraday variance, adjusted
    std::vector<double> amount;      // treated daily amount
    std::vector<double> amount_raw;  // pre-treatment daily amount
};

struct BacktestData {
    std::vector<std::string> risky_assets;
    std::string risk_free_asset = "USDT";
    std::vector<EpochDay> dates;      // ascending
    std::vector<AssetSeries> series;  // one per risky asset, same order
    // Optional realized intraday covariance per date (risky x risky, already
    // scaled to daily units). Empty matrix = unavailable for that date.
    std::vector<Eigen::MatrixXd> realized_cov;

    portfolio::Universe universe() const;  // risk-free first
    void validate() const;
};

// Assembles aligned series from per-asset daily records plus daily amount
// panels (for the raw amounts). Dates are the intersection across assets.
BacktestData align_market(const std::vector<std::vector<liquidity::DailyLiquidityRecord>>& records,
                          const std::vector<std::vector<market_data::DailyAmountRow>>& panels,
                          const std::string& risk_free_asset = "USDT");

enum class CovMode { kIntradayCovariance, kDailyOuterProduct };
enum class ForecastMode { kModel, kPerfectForesight };

struct BacktestConfig {
    int window_days = 365;
    std::vector<int> portfolios = {1, 2, 3, 4, 5, 6, 7, 8};
    std::uint64_t seed = 0;
    double beta_cap = 10.0;
    double lambda_min = 0.1;
    double cap_risky = 0.300;
    double annualization = 365.0;
    int p_max = 4;
    int q_max = 4;
    int refit_every = 1;  // model refit cadence in days for portfolios 7/8
    CovMode cov_mode = CovMode::kIntradayCovariance;
    ForecastMode forecast_mode = ForecastMode::kModel;
    bool market_weights_use_treated = true;  // portfolio 2 amounts
    std::optional<EpochDay> date_start;      // clip the aligned sample
    std::optional<EpochDay> date_end;
    unsigned jobs = 1;

    void validate() const;
};

struct LedgerRow {
    EpochDay date = 0;  // realized day (t+1)
    double r_p = 0;
    double var_p = 0;
    double sd_p = 0;
    double equity = 1.0;  // cumulative product of (1 + r_p) through this row
    Eigen::VectorXd weights;  // decided the day before; universe order
    bool rebalance_held = false;  // decision inputs missing, previous weights kept
};

struct PortfolioLedger {
    int id = 0;
    std::string name;  // equ, mkt, blq, blq_inv, MV_rr, MV_rrlq, MV_arga_rr, MV_arga_rrlq
    std::vector<LedgerRow> days;
    double ann_return = 0;
    double ann_sd = 0;
    double sharpe = 0;
};

struct ForecastPoint {
    EpochDay date = 0;  // forecast target day
    double mu_hat = 0;
    double sigma2_hat = 0;
    double realized = 0;
    int p = 0, q = 0;
    std::string vol_spec;
    double aic = 0;
};

struct BacktestLedger {
    std::vector<EpochDay> decision_dates;
    std::vector<PortfolioLedger> portfolios;
    // Per risky asset, standard-model and adjusted-model forecast tracks
    // (filled when portfolios 7 / 8 run).
    std::vector<std::vector<ForecastPoint>> forecasts_std;
    std::vector<std::vector<ForecastPoint>> forecasts_la;
    std::size_t held_rebalances = 0;
};

const char* portfolio_name(int id);

BacktestLedger run_backtest(const BacktestData& data, const BacktestConfig& config);

// Recomputes the per-portfolio summary block from the daily rows.
void summarize_ledger(PortfolioLedger& ledger, double annualization);

// ---------------------------------------------------------------------------
// Report emitters. Shapes follow the tables of the reference workflow:
// summary (per-portfolio performance), beta stats, amount concentration,
// variance panels, stationarity/RMSE panel, equity curves, plus scatter and
// histogram series for plotting.

struct ReportOptions {
    double beta_cap = 10.0;
    double low_liquidity_threshold = 0.10;
    int max_adf_lag = 20;
    int beta_hist_bins = 50;
};

void write_summary_csv(const std::string& path, const BacktestLedger& ledger);
void write_beta_stats_csv(const std::string& path, const BacktestData& data,
                          const ReportOptions& opts);
void write_amount_stats_csv(const std::string& path, const BacktestData& data);
void write_return_stats_csv(const std::string& path, const BacktestData& data);
void write_variance_stats_csv(const std::string& path, const BacktestData& data);
void write_adf_rmse_csv(const std::string& path, const BacktestData& data,
                        const BacktestLedger& ledger, const ReportOptions& opts);
void write_equity_curves_csv(const std::string& path, const BacktestLedger& ledger);
void write_weights_csv(const std::string& path, const BacktestData& data,
                       const BacktestLedger& ledger);
void write_performance_csv(const std::string& path, const BacktestLedger& ledger);
void write_forecast_csv(const std::string& path, const BacktestData& data,
                        const BacktestLedger& ledger);
void write_scatter_csv(const std::string& path, const BacktestData& data);
void write_beta_histogram_csv(const std::string& path, const BacktestData& data,
                              const ReportOptions& opts);

// Writes the full bundle into out_dir.
void write_reports(const std::string& out_dir, const BacktestData& data,
                   const BacktestLedger& ledger, const ReportOptions& opts);

}  // namespace llab::backtest
