#include "llab/backtest/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "llab/core/csv.hpp"
#include "llab/core/log.hpp"
#include "llab/core/parallel.hpp"
#include "llab/core/stats.hpp"

namespace llab::backtest {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite(double x) { return std::isfinite(x); }

std::vector<double> finite_only(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) {
        if (finite(x)) out.push_back(x);
    }
    return out;
}
}  // namespace

portfolio::Universe BacktestData::universe() const {
    portfolio::Universe u;
    u.assets.push_back(risk_free_asset);
    for (const auto& a : risky_assets) u.assets.push_back(a);
    u.risk_free_index = 0;
    return u;
}

void BacktestData::validate() const {
    if (risky_assets.empty()) throw std::invalid_argument("backtest data: no assets");
    if (series.size() != risky_assets.size()) {
        throw std::invalid_argument("backtest data: series/asset mismatch");
    }
    for (const auto& s : series) {
        if (s.r.size() != dates.size() || s.r_lq.size() != dates.size() ||
            s.beta.size() != dates.size() || s.amount.size() != dates.size() ||
            s.amount_raw.size() != dates.size()) {
            throw std::invalid_argument("backtest data: ragged series for " + s.asset);
        }
    }
    if (!std::is_sorted(dates.begin(), dates.end())) {
        throw std::invalid_argument("backtest data: dates not ascending");
    }
    if (!realized_cov.empty() && realized_cov.size() != dates.size()) {
        throw std::invalid_argument("backtest data: realized_cov misaligned");
    }
}

BacktestData align_market(const std::vector<std::vector<liquidity::DailyLiquidityRecord>>& records,
                          const std::vector<std::vector<market_data::DailyAmountRow>>& panels,
                          const std::string& risk_free_asset) {
    if (records.empty()) throw std::invalid_argument("align_market: no assets");
    if (!panels.empty() && panels.size() != records.size()) {
        throw std::invalid_argument("align_market: panel/record mismatch");
    }

    // Intersection of dates across assets.
    std::map<EpochDay, int> date_count;
    for (const auto& asset_records : records) {
        std::set<EpochDay> seen;
        for (const auto& r : asset_records) seen.insert(r.date);
        for (EpochDay d : seen) ++date_count[d];
    }
    BacktestData data;
    data.risk_free_asset = risk_free_asset;
    for (const auto& [d, c] : date_count) {
        if (c == static_cast<int>(records.size())) data.dates.push_back(d);
    }
    if (data.dates.empty()) throw std::invalid_argument("align_market: no common dates");

    std::map<EpochDay, std::size_t> date_index;
    for (std::size_t i = 0; i < data.dates.size(); ++i) date_index[data.dates[i]] = i;

    for (std::size_t a = 0; a < records.size(); ++a) {
        if (records[a].empty()) throw std::invalid_argument("align_market: empty asset series");
        AssetSeries s;
        s.asset = records[a].front().asset;
        const std::size_t n = data.dates.size();
        s.r.assign(n, kNaN);
        s.r_lq.assign(n, kNaN);
        s.beta.assign(n, kNaN);
        s.var_tt.assign(n, kNaN);
        s.var_lq_tt.assign(n, kNaN);
        s.amount.assign(n, kNaN);
        s.amount_raw.assign(n, kNaN);
        for (const auto& r : records[a]) {
            auto it = date_index.find(r.date);
            if (it == date_index.end()) continue;
            std::size_t i = it->second;
            s.r[i] = r.r_tt;
            s.r_lq[i] = r.r_lq_tt;
            s.beta[i] = r.beta_tt;
            s.var_tt[i] = r.var_tt;
            s.var_lq_tt[i] = r.var_lq_tt;
            s.amount[i] = r.amount_tt;
            s.amount_raw[i] = r.amount_tt;  // overwritten below when panels exist
        }
        if (!panels.empty()) {
            for (const auto& p : panels[a]) {
                auto it = date_index.find(p.date);
                if (it == date_index.end()) continue;
                s.amount_raw[it->second] = p.amount_tt_raw;
            }
        }
        data.risky_assets.push_back(s.asset);
        data.series.push_back(std::move(s));
    }
    data.validate();
    return data;
}

void BacktestConfig::validate() const {
    if (window_days < 30) throw std::invalid_argument("window_days must be >= 30");
    if (portfolios.empty()) throw std::invalid_argument("no portfolios selected");
    for (int id : portfolios) {
        if (id < 1 || id > 8) throw std::invalid_argument("portfolio id out of 1..8");
    }
    if (!(beta_cap > 0.0) || !(lambda_min > 0.0) || !(cap_risky > 0.0) ||
        !(annualization > 0.0)) {
        throw std::invalid_argument("config scales must be positive");
    }
    if (p_max < 0 || p_max > 4 || q_max < 0 || q_max > 4) {
        throw std::invalid_argument("model orders limited to 0..4");
    }
    if (refit_every < 1) throw std::invalid_argument("refit_every must be >= 1");
}

const char* portfolio_name(int id) {
    switch (id) {
        case 1: return "equ";
        case 2: return "mkt";
        case 3: return "blq";
        case 4: return "blq_inv";
        case 5: return "MV_rr";
        case 6: return "MV_rrlq";
        case 7: return "MV_arga_rr";
        case 8: return "MV_arga_rrlq";
    }
    return "?";
}

namespace {

struct FitCache {
    arga::ModelFit fit;
    int last_fit_day = -1;
    bool valid = false;
};

struct ForecastSlot {
    bool ok = false;
    arga::Forecast fc;
    ForecastPoint point;
};

// Moments of a window across assets; columns are assets.
void window_moments(const BacktestData& data, bool adjusted, int lo, int hi,
                    Eigen::VectorXd& mu, Eigen::MatrixXd& cov) {
    const int R = static_cast<int>(data.series.size());
    const int W = hi - lo + 1;
    Eigen::MatrixXd X(W, R);
    for (int a = 0; a < R; ++a) {
        const auto& v = adjusted ? data.series[a].r_lq : data.series[a].r;
        for (int k = 0; k < W; ++k) X(k, a) = v[lo + k];
    }
    mu = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - mu.transpose();
    cov = (centered.transpose() * centered) / static_cast<double>(W);
}

Eigen::VectorXd border_mu(const Eigen::VectorXd& mu_risky) {
    Eigen::VectorXd mu(mu_risky.size() + 1);
    mu(0) = 0.0;
    mu.tail(mu_risky.size()) = mu_risky;
    return mu;
}

Eigen::MatrixXd border_cov(const Eigen::MatrixXd& cov_risky) {
    const auto R = cov_risky.rows();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(R + 1, R + 1);
    cov.bottomRightCorner(R, R) = cov_risky;
    return cov;
}

}  // namespace

BacktestLedger run_backtest(const BacktestData& data_in, const BacktestConfig& config) {
    config.validate();
    data_in.validate();

    // Clip to the configured date range.
    BacktestData data = data_in;
    if (config.date_start || config.date_end) {
        std::size_t lo = 0, hi = data.dates.size();
        while (lo < hi && config.date_start && data.dates[lo] < *config.date_start) ++lo;
        while (hi > lo && config.date_end && data.dates[hi - 1] > *config.date_end) --hi;
        auto clip = [&](auto& v) { v = {v.begin() + lo, v.begin() + hi}; };
        clip(data.dates);
        for (auto& s : data.series) {
            clip(s.r);
            clip(s.r_lq);
            clip(s.beta);
            clip(s.var_tt);
            clip(s.var_lq_tt);
            clip(s.amount);
            clip(s.amount_raw);
        }
        if (!data.realized_cov.empty()) clip(data.realized_cov);
    }

    const int n = static_cast<int>(data.dates.size());
    const int W = config.window_days;
    const int R = static_cast<int>(data.series.size());
    const int N = R + 1;  // with the risk-free slot at index 0
    if (n < W + 1) throw std::invalid_argument("run_backtest: sample shorter than window + 1");

    portfolio::Universe universe = data.universe();

    // Market-portfolio return series for the risk-aversion estimate. Weights
    // use the previous day's raw amounts (raw so the series is invariant to
    // the wash toggle); the first day falls back to equal weights.
    std::vector<double> mkt(n, kNaN);
    for (int s = 0; s < n; ++s) {
        double wsum = 0.0, ret = 0.0;
        bool ok = true;
        for (int a = 0; a < R; ++a) {
            double w = 1.0;
            if (s > 0) w = data.series[a].amount_raw[s - 1];
            double r = data.series[a].r[s];
            if (!finite(w) || !finite(r) || w < 0.0) {
                ok = false;
                break;
            }
            wsum += w;
            ret += w * r;
        }
        if (ok && wsum > 0.0) mkt[s] = ret / wsum;
    }

    BacktestLedger ledger;
    std::map<int, int> slot_of_id;
    for (int id : config.portfolios) {
        PortfolioLedger pl;
        pl.id = id;
        pl.name = portfolio_name(id);
        slot_of_id[id] = static_cast<int>(ledger.portfolios.size());
        ledger.portfolios.push_back(std::move(pl));
    }
    const bool want_std_fc = slot_of_id.count(7) > 0;
    const bool want_la_fc = slot_of_id.count(8) > 0;
    ledger.forecasts_std.resize(want_std_fc ? R : 0);
    ledger.forecasts_la.resize(want_la_fc ? R : 0);

    std::vector<FitCache> cache_std(R), cache_la(R);
    std::map<int, Eigen::VectorXd> prev_weights;
    for (int id : config.portfolios) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(N);
        w(0) = 1.0;
        prev_weights[id] = std::move(w);
    }
    std::map<int, double> equity;
    for (int id : config.portfolios) equity[id] = 1.0;

    for (int t = W - 1; t + 1 < n; ++t) {
        ledger.decision_dates.push_back(data.dates[t]);
        const int lo = t - W + 1;

        // --- decision-time inputs
        bool state_ok = true;   // yesterday's beta and amounts (portfolios 2-4)
        bool window_ok = true;  // full trailing window of returns (5-8)
        for (int a = 0; a < R; ++a) {
            const auto& s = data.series[a];
            if (!finite(s.beta[t]) || !finite(s.amount[t]) || !finite(s.amount_raw[t])) {
                state_ok = false;
            }
            for (int k = lo; k <= t && window_ok; ++k) {
                if (!finite(s.r[k]) || !finite(s.r_lq[k]) || !finite(s.beta[k])) window_ok = false;
            }
        }

        std::optional<double> lambda;
        if (window_ok) {
            std::vector<double> win(mkt.begin() + lo, mkt.begin() + t + 1);
            bool mkt_ok = std::all_of(win.begin(), win.end(), finite);
            if (mkt_ok) {
                try {
                    lambda = portfolio::risk_aversion(win, config.lambda_min).lambda;
                } catch (const std::invalid_argument&) {
                }
            }
        }

        // --- moments and forecasts for the optimizing portfolios
        Eigen::VectorXd mu_r, mu_rlq;
        Eigen::MatrixXd cov_r, cov_rlq;
        if (window_ok &&
            (slot_of_id.count(5) || slot_of_id.count(7))) {
            window_moments(data, false, lo, t, mu_r, cov_r);
        }
        if (window_ok && (slot_of_id.count(6) || slot_of_id.count(8))) {
            window_moments(data, true, lo, t, mu_rlq, cov_rlq);
        }

        std::vector<ForecastSlot> fc_std(R), fc_la(R);
        if (window_ok && (want_std_fc || want_la_fc)) {
            if (config.forecast_mode == ForecastMode::kPerfectForesight) {
                for (int a = 0; a < R; ++a) {
                    if (want_std_fc) {
                        fc_std[a].ok = true;
                        fc_std[a].fc = {data.series[a].r[t + 1], 0.0};
                        fc_std[a].point = {data.dates[t + 1], data.series[a].r[t + 1], 0.0,
                                           data.series[a].r[t + 1], 0, 0, "foresight", 0.0};
                    }
                    if (want_la_fc) {
                        fc_la[a].ok = true;
                        fc_la[a].fc = {data.series[a].r_lq[t + 1], 0.0};
                        fc_la[a].point = {data.dates[t + 1], data.series[a].r_lq[t + 1], 0.0,
                                          data.series[a].r_lq[t + 1], 0, 0, "foresight", 0.0};
                    }
                }
            } else {
                parallel_for(static_cast<std::size_t>(R), config.jobs, [&](std::size_t a) {
                    const auto& s = data.series[a];
                    std::vector<double> win_r(s.r.begin() + lo, s.r.begin() + t + 1);
                    std::vector<double> win_rlq(s.r_lq.begin() + lo, s.r_lq.begin() + t + 1);
                    std::vector<double> win_beta(s.beta.begin() + lo, s.beta.begin() + t + 1);

                    auto run_one = [&](FitCache& cache, ForecastSlot& slot,
                                       const std::vector<double>& y,
                                       std::span<const double> beta, arga::VolMode mode) {
                        try {
                            if (!cache.valid || t - cache.last_fit_day >= config.refit_every) {
                                arga::FitOptions fo;
                                fo.p_max = config.p_max;
                                fo.q_max = config.q_max;
                                fo.mode = mode;
                                cache.fit = arga::fit_model(y, fo, beta);
                                cache.last_fit_day = t;
                                cache.valid = true;
                            }
                            slot.fc = arga::forecast_one_step(cache.fit, y, beta);
                            slot.ok = true;
                            slot.point.date = data.dates[t + 1];
                            slot.point.mu_hat = slot.fc.mu_hat;
                            slot.point.sigma2_hat = slot.fc.sigma2_hat;
                            slot.point.p = cache.fit.arma.spec.p;
                            slot.point.q = cache.fit.arma.spec.q;
                            slot.point.vol_spec = arga::vol_spec_name(cache.fit.vol.kind);
                            slot.point.aic = cache.fit.aic;
                        } catch (const std::exception& e) {
                            LLAB_WARN("fit failed for " << s.asset << " at day index " << t << ": "
                                                        << e.what());
                            slot.ok = false;
                        }
                    };
                    if (want_std_fc) {
                        run_one(cache_std[a], fc_std[a], win_r, {}, arga::VolMode::kStandard);
                        fc_std[a].point.realized = s.r[t + 1];
                    }
                    if (want_la_fc) {
                        run_one(cache_la[a], fc_la[a], win_rlq, win_beta,
                                arga::VolMode::kLiquidityAdjusted);
                        fc_la[a].point.realized = s.r_lq[t + 1];
                    }
                });
            }
        }
        if (want_std_fc) {
            for (int a = 0; a < R; ++a) {
                if (fc_std[a].ok && finite(fc_std[a].point.realized)) {
                    ledger.forecasts_std[a].push_back(fc_std[a].point);
                }
            }
        }
        if (want_la_fc) {
            for (int a = 0; a < R; ++a) {
                if (fc_la[a].ok && finite(fc_la[a].point.realized)) {
                    ledger.forecasts_la[a].push_back(fc_la[a].point);
                }
            }
        }

        // --- weights per portfolio
        auto decide = [&](int id) -> std::optional<Eigen::VectorXd> {
            switch (id) {
                case 1: {
                    portfolio::BenchmarkInputs in;
                    return portfolio::benchmark_weights(portfolio::BenchmarkKind::kEqual, universe,
                                                        in)
                        .w;
                }
                case 2:
                case 3:
                case 4: {
                    if (!state_ok) return std::nullopt;
                    portfolio::BenchmarkInputs in;
                    for (int a = 0; a < R; ++a) {
                        in.beta.push_back(data.series[a].beta[t]);
                        in.amount.push_back(config.market_weights_use_treated
                                                ? data.series[a].amount[t]
                                                : data.series[a].amount_raw[t]);
                    }
                    auto kind = id == 2 ? portfolio::BenchmarkKind::kMarket
                                : id == 3 ? portfolio::BenchmarkKind::kLiquidity
                                          : portfolio::BenchmarkKind::kInverseLiquidity;
                    return portfolio::benchmark_weights(kind, universe, in).w;
                }
                case 5:
                case 6:
                case 7:
                case 8: {
                    if (!window_ok || !lambda) return std::nullopt;
                    portfolio::MvProblem prob;
                    prob.lambda = *lambda;
                    prob.cap_risky = config.cap_risky;
                    prob.risk_free_index = 0;
                    if (id == 5) {
                        prob.mu = border_mu(mu_r);
                        prob.sigma = border_cov(cov_r);
                    } else if (id == 6) {
                        prob.mu = border_mu(mu_rlq);
                        prob.sigma = border_cov(cov_rlq);
                    } else {
                        Eigen::VectorXd mu_hat(R);
                        const auto& fc = (id == 7) ? fc_std : fc_la;
                        for (int a = 0; a < R; ++a) {
                            if (!fc[a].ok) return std::nullopt;
                            mu_hat(a) = fc[a].fc.mu_hat;
                        }
                        prob.mu = border_mu(mu_hat);
                        prob.sigma = border_cov(id == 7 ? cov_r : cov_rlq);
                    }
                    return portfolio::solve_mv(prob);
                }
            }
            return std::nullopt;
        };

        // --- realized day t+1
        Eigen::VectorXd realized = Eigen::VectorXd::Zero(N);
        bool realized_ok = true;
        for (int a = 0; a < R; ++a) {
            double r = data.series[a].r[t + 1];
            if (!finite(r)) realized_ok = false;
            realized(a + 1) = r;
        }
        Eigen::MatrixXd day_cov;
        if (realized_ok) {
            bool have_intraday = config.cov_mode == CovMode::kIntradayCovariance &&
                                 !data.realized_cov.empty() &&
                                 data.realized_cov[t + 1].rows() == R;
            if (have_intraday) {
                day_cov = border_cov(data.realized_cov[t + 1]);
            } else {
                day_cov = realized * realized.transpose();
            }
        }

        for (auto& pl : ledger.portfolios) {
            LedgerRow row;
            row.date = data.dates[t + 1];
            auto w = decide(pl.id);
            if (w) {
                row.weights = *w;
                prev_weights[pl.id] = *w;
            } else {
                row.weights = prev_weights[pl.id];
                row.rebalance_held = true;
                ++ledger.held_rebalances;
            }
            if (realized_ok) {
                auto perf = portfolio::realized_performance(row.weights, realized, day_cov,
                                                            config.annualization);
                row.r_p = perf.r_p;
                row.var_p = perf.var_p;
                row.sd_p = perf.sd_p;
            } else {
                row.rebalance_held = true;  // gap day: nothing earned, equity carried
            }
            equity[pl.id] *= (1.0 + row.r_p);
            row.equity = equity[pl.id];
            pl.days.push_back(std::move(row));
        }
    }

    for (auto& pl : ledger.portfolios) summarize_ledger(pl, config.annualization);
    return ledger;
}

void summarize_ledger(PortfolioLedger& ledger, double annualization) {
    std::vector<double> rp;
    rp.reserve(ledger.days.size());
    for (const auto& d : ledger.days) rp.push_back(d.r_p);
    ledger.ann_return = mean(rp) * annualization;
    ledger.ann_sd = stddev_pop(rp) * std::sqrt(annualization);
    ledger.sharpe = ledger.ann_sd > 0.0 ? ledger.ann_return / ledger.ann_sd : 0.0;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::vector<std::string> describe_row(const std::string& asset, const std::string& series,
                                      const Describe& d) {
    return {asset,
            series,
            format_i64(static_cast<std::int64_t>(d.count)),
            format_double(d.mean),
            format_double(d.std),
            format_double(d.min),
            format_double(d.q25),
            format_double(d.median),
            format_double(d.q75),
            format_double(d.max)};
}

constexpr const char* kDescribeHeader = "asset,series,count,mean,std,min,q25,median,q75,max";

// Count of largest values whose running sum first reaches `share` of total.
int days_carrying_share(std::vector<double> v, double share) {
    std::sort(v.begin(), v.end(), std::greater<double>());
    double total = 0.0;
    for (double x : v) total += x;
    if (!(total > 0.0)) return 0;
    double acc = 0.0;
    int k = 0;
    for (double x : v) {
        acc += x;
        ++k;
        if (acc >= share * total) break;
    }
    return k;
}

}  // namespace

void write_summary_csv(const std::string& path, const BacktestLedger& ledger) {
    CsvWriter w(path, "portfolio_id,name,ann_return,ann_sd,sharpe,n_days,final_equity");
    for (const auto& pl : ledger.portfolios) {
        double final_eq = pl.days.empty() ? 1.0 : pl.days.back().equity;
        w.write_row({format_i64(pl.id), pl.name, format_double(pl.ann_return),
                     format_double(pl.ann_sd), format_double(pl.sharpe),
                     format_i64(static_cast<std::int64_t>(pl.days.size())),
                     format_double(final_eq)});
    }
}

void write_beta_stats_csv(const std::string& path, const BacktestData& data,
                          const ReportOptions& opts) {
    CsvWriter w(path,
                "asset,count,mean,std,min,q25,median,q75,max,"
                "capped_days,capped_pct,beta_weight_capped,beta_weight_ge_mean,"
                "days_ge_mean,pct_ge_mean,days_ge_1,pct_ge_1,days_le_low,pct_le_low");
    for (const auto& s : data.series) {
        std::vector<double> beta = finite_only(s.beta);
        Describe d = describe(beta);
        double total_beta = 0.0, capped_mass = 0.0, ge_mean_mass = 0.0;
        std::int64_t capped = 0, ge_mean = 0, ge_one = 0, le_low = 0;
        for (double b : beta) {
            total_beta += b;
            if (b >= opts.beta_cap - 1e-12) {
                ++capped;
                capped_mass += b;
            }
            if (b >= d.mean) {
                ++ge_mean;
                ge_mean_mass += b;
            }
            if (b >= 1.0) ++ge_one;
            if (b <= opts.low_liquidity_threshold) ++le_low;
        }
        double n = static_cast<double>(beta.empty() ? 1 : beta.size());
        w.write_row({s.asset, format_i64(static_cast<std::int64_t>(beta.size())),
                     format_double(d.mean), format_double(d.std), format_double(d.min),
                     format_double(d.q25), format_double(d.median), format_double(d.q75),
                     format_double(d.max), format_i64(capped), format_double(capped / n),
                     format_double(total_beta > 0 ? capped_mass / total_beta : 0.0),
                     format_double(total_beta > 0 ? ge_mean_mass / total_beta : 0.0),
                     format_i64(ge_mean), format_double(ge_mean / n), format_i64(ge_one),
                     format_double(ge_one / n), format_i64(le_low), format_double(le_low / n)});
    }
}

void write_amount_stats_csv(const std::string& path, const BacktestData& data) {
    CsvWriter w(path,
                "asset,count,mean,std,min,q25,median,q75,max,total,"
                "days_carrying_25pct,days_carrying_50pct,days_carrying_75pct,"
                "treated_ratio_mean,treated_ratio_min,treated_ratio_median,treated_ratio_max");
    for (const auto& s : data.series) {
        std::vector<double> amt = finite_only(s.amount);
        Describe d = describe(amt);
        double total = 0.0;
        for (double x : amt) total += x;
        std::vector<double> ratio;
        for (std::size_t i = 0; i < s.amount.size(); ++i) {
            if (finite(s.amount[i]) && finite(s.amount_raw[i]) && s.amount_raw[i] > 0.0) {
                ratio.push_back(s.amount[i] / s.amount_raw[i]);
            }
        }
        Describe rd = describe(ratio);
        w.write_row({s.asset, format_i64(static_cast<std::int64_t>(amt.size())),
                     format_double(d.mean), format_double(d.std), format_double(d.min),
                     format_double(d.q25), format_double(d.median), format_double(d.q75),
                     format_double(d.max), format_double(total),
                     format_i64(days_carrying_share(amt, 0.25)),
                     format_i64(days_carrying_share(amt, 0.50)),
                     format_i64(days_carrying_share(amt, 0.75)), format_double(rd.mean),
                     format_double(rd.min), format_double(rd.median), format_double(rd.max)});
    }
}

void write_return_stats_csv(const std::string& path, const BacktestData& data) {
    CsvWriter w(path, kDescribeHeader);
    for (const auto& s : data.series) {
        w.write_row(describe_row(s.asset, "r_tt", describe(finite_only(s.r))));
    }
    for (const auto& s : data.series) {
        w.write_row(describe_row(s.asset, "r_lq_tt", describe(finite_only(s.r_lq))));
    }
}

void write_variance_stats_csv(const std::string& path, const BacktestData& data) {
    CsvWriter w(path, kDescribeHeader);
    for (const auto& s : data.series) {
        w.write_row(describe_row(s.asset, "var_tt", describe(finite_only(s.var_tt))));
    }
    for (const auto& s : data.series) {
        w.write_row(describe_row(s.asset, "var_lq_tt", describe(finite_only(s.var_lq_tt))));
    }
}

void write_adf_rmse_csv(const std::string& path, const BacktestData& data,
                        const BacktestLedger& ledger, const ReportOptions& opts) {
    CsvWriter w(path, "asset,series,adf_stat,p_value,used_lag,nobs,best_ic,rmse,n_oos");
    auto emit = [&](const std::string& asset, const std::string& series,
                    const std::vector<double>& y, const std::vector<ForecastPoint>* track) {
        std::string stat = "", pv = "", lag = "", nobs = "", ic = "";
        try {
            arga::AdfResult res = arga::adf_test(finite_only(y), opts.max_adf_lag);
            stat = format_double(res.statistic);
            pv = format_double(res.p_value);
            lag = format_i64(res.used_lag);
            nobs = format_i64(res.nobs);
            ic = format_double(res.best_ic);
        } catch (const std::exception& e) {
            LLAB_WARN("adf failed for " << asset << "/" << series << ": " << e.what());
        }
        std::string rm = "", n_oos = "0";
        if (track && !track->empty()) {
            std::vector<double> f, g;
            for (const auto& pt : *track) {
                f.push_back(pt.mu_hat);
                g.push_back(pt.realized);
            }
            rm = format_double(arga::rmse(f, g));
            n_oos = format_i64(static_cast<std::int64_t>(f.size()));
        }
        w.write_row({asset, series, stat, pv, lag, nobs, ic, rm, n_oos});
    };
    for (std::size_t a = 0; a < data.series.size(); ++a) {
        const auto* track =
            a < ledger.forecasts_std.size() ? &ledger.forecasts_std[a] : nullptr;
        emit(data.series[a].asset, "r_tt", data.series[a].r, track);
    }
    for (std::size_t a = 0; a < data.series.size(); ++a) {
        const auto* track = a < ledger.forecasts_la.size() ? &ledger.forecasts_la[a] : nullptr;
        emit(data.series[a].asset, "r_lq_tt", data.series[a].r_lq, track);
    }
}

void write_equity_curves_csv(const std::string& path, const BacktestLedger& ledger) {
    CsvWriter w(path, "date,portfolio_id,name,equity");
    for (const auto& pl : ledger.portfolios) {
        for (const auto& d : pl.days) {
            w.write_row({format_date(d.date), format_i64(pl.id), pl.name,
                         format_double(d.equity)});
        }
    }
}

void write_weights_csv(const std::string& path, const BacktestData& data,
                       const BacktestLedger& ledger) {
    portfolio::Universe u = data.universe();
    CsvWriter w(path, "date,portfolio_id,asset,weight");
    for (const auto& pl : ledger.portfolios) {
        for (const auto& d : pl.days) {
            for (int i = 0; i < u.size(); ++i) {
                w.write_row({format_date(d.date), format_i64(pl.id), u.assets[i],
                             format_double(d.weights(i))});
            }
        }
    }
}

void write_performance_csv(const std::string& path, const BacktestLedger& ledger) {
    CsvWriter w(path, "date,portfolio_id,r_p,var_p,sd_p");
    for (const auto& pl : ledger.portfolios) {
        for (const auto& d : pl.days) {
            w.write_row({format_date(d.date), format_i64(pl.id), format_double(d.r_p),
                         format_double(d.var_p), format_double(d.sd_p)});
        }
    }
}

void write_forecast_csv(const std::string& path, const BacktestData& data,
                        const BacktestLedger& ledger) {
    CsvWriter w(path, "asset,date,mu_hat,sigma2_hat,model,p,q,vol_spec,la_mode,aic");
    auto emit = [&](const std::vector<std::vector<ForecastPoint>>& tracks, const char* la) {
        for (std::size_t a = 0; a < tracks.size(); ++a) {
            for (const auto& pt : tracks[a]) {
                std::string model =
                    pt.vol_spec == "foresight" ? "foresight" : "arma-" + pt.vol_spec;
                w.write_row({data.series[a].asset, format_date(pt.date), format_double(pt.mu_hat),
                             format_double(pt.sigma2_hat), model, format_i64(pt.p),
                             format_i64(pt.q), pt.vol_spec, la, format_double(pt.aic)});
            }
        }
    };
    emit(ledger.forecasts_std, "off");
    emit(ledger.forecasts_la, "on");
}

void write_scatter_csv(const std::string& path, const BacktestData& data) {
    CsvWriter w(path, "asset,date,r_tt,sigma_tt,beta_tt");
    for (const auto& s : data.series) {
        for (std::size_t i = 0; i < data.dates.size(); ++i) {
            if (!finite(s.r[i]) || !finite(s.var_tt[i]) || !finite(s.beta[i])) continue;
            w.write_row({s.asset, format_date(data.dates[i]), format_double(s.r[i]),
                         format_double(std::sqrt(std::max(0.0, s.var_tt[i]))),
                         format_double(s.beta[i])});
        }
    }
}

void write_beta_histogram_csv(const std::string& path, const BacktestData& data,
                              const ReportOptions& opts) {
    CsvWriter w(path, "asset,bin_lo,bin_hi,count");
    const int bins = opts.beta_hist_bins;
    const double width = opts.beta_cap / bins;
    for (const auto& s : data.series) {
        std::vector<std::int64_t> counts(bins, 0);
        for (double b : s.beta) {
            if (!finite(b)) continue;
            int k = std::min(bins - 1, std::max(0, static_cast<int>(b / width)));
            ++counts[k];
        }
        for (int k = 0; k < bins; ++k) {
            w.write_row({s.asset, format_double(k * width), format_double((k + 1) * width),
                         format_i64(counts[k])});
        }
    }
}

void write_reports(const std::string& out_dir, const BacktestData& data,
                   const BacktestLedger& ledger, const ReportOptions& opts) {
    write_summary_csv(out_dir + "/summary.csv", ledger);
    write_beta_stats_csv(out_dir + "/beta_stats.csv", data, opts);
    write_amount_stats_csv(out_dir + "/amount_stats.csv", data);
    write_return_stats_csv(out_dir + "/return_stats.csv", data);
    write_variance_stats_csv(out_dir + "/variance_stats.csv", data);
    write_adf_rmse_csv(out_dir + "/adf_rmse.csv", data, ledger, opts);
    write_equity_curves_csv(out_dir + "/equity_curves.csv", ledger);
    write_weights_csv(out_dir + "/weights.csv", data, ledger);
    write_performance_csv(out_dir + "/performance.csv", ledger);
    write_forecast_csv(out_dir + "/forecasts.csv", data, ledger);
    write_scatter_csv(out_dir + "/scatter_r_sigma_beta.csv", data);
    write_beta_histogram_csv(out_dir + "/beta_hist.csv", data, opts);
}

}  // namespace llab::backtest
