#include "llab/pipeline/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "llab/arga/model.hpp"
#include "llab/core/csv.hpp"
#include "llab/core/log.hpp"
#include "llab/core/parallel.hpp"
#include "llab/core/stats.hpp"
#include "llab/liquidity/liquidity.hpp"

namespace fs = std::filesystem;

namespace llab::pipeline {

namespace {

void ensure_dir(const std::string& path) { fs::create_directories(path); }

std::string marker_path(const std::string& out_dir, const std::string& stage) {
    return out_dir + "/.stage_" + stage;
}

bool stage_cached(const std::string& out_dir, const std::string& stage, const std::string& hash,
                  const std::vector<std::string>& outputs) {
    std::ifstream in(marker_path(out_dir, stage));
    if (!in) return false;
    std::string stored;
    std::getline(in, stored);
    if (stored != hash) return false;
    for (const auto& f : outputs) {
        if (!fs::exists(f)) return false;
    }
    return true;
}

void write_marker(const std::string& out_dir, const std::string& stage, const std::string& hash) {
    std::ofstream out(marker_path(out_dir, stage), std::ios::binary);
    out << hash << "\n";
}

void write_failure_marker(const std::string& out_dir, const std::string& stage,
                          const std::string& what) {
    std::ofstream out(out_dir + "/FAILED", std::ios::binary);
    out << stage << "\n" << what << "\n";
}

std::string minutes_path(const RunConfig& cfg, const std::string& asset) {
    return cfg.out_dir + "/minutes/" + asset + ".csv";
}
std::string panels_path(const RunConfig& cfg, const std::string& asset) {
    return cfg.out_dir + "/panels/" + asset + ".csv";
}
std::string daily_path(const RunConfig& cfg, const std::string& asset) {
    return cfg.out_dir + "/daily/" + asset + ".csv";
}

void stage_market_data(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir + "/minutes");
    ensure_dir(cfg.out_dir + "/panels");
    parallel_for(cfg.assets.size(), cfg.jobs, [&](std::size_t i) {
        const auto& asset = cfg.assets[i];
        auto ingest = market_data::ingest_ticks(asset.ticks_path, asset.name);
        auto bars = market_data::aggregate_minutes(ingest.ticks);
        bars = market_data::apply_wash_treatment(std::move(bars), cfg.wash);
        auto built = market_data::build_day_panels(bars);
        market_data::write_minute_csv(minutes_path(cfg, asset.name), bars);
        market_data::write_daily_panel_csv(panels_path(cfg, asset.name), built.panels);
        LLAB_INFO("market_data " << asset.name << ": " << built.panels.size() << " days, "
                                 << ingest.skipped_rows << " skipped rows");
    });
}

void stage_liquidity(const RunConfig& cfg) {
    ensure_dir(cfg.out_dir + "/daily");
    KeyedRng stream(cfg.seed);
    parallel_for(cfg.assets.size(), cfg.jobs, [&](std::size_t i) {
        const auto& asset = cfg.assets[i];
        auto bars = market_data::read_minute_csv(minutes_path(cfg, asset.name));
        auto built = market_data::build_day_panels(bars);
        std::vector<liquidity::DailyLiquidityRecord> records;
        records.reserve(built.panels.size());
        std::size_t unusable = 0;
        for (const auto& panel : built.panels) {
            auto day = liquidity::process_day(panel, stream, cfg.beta_cap);
            if (!day.usable) {
                ++unusable;
                LLAB_WARN("liquidity " << asset.name << " " << format_date(panel.date)
                                       << ": day unusable (" << day.reason << ")");
                continue;
            }
            records.push_back(day.record);
        }
        liquidity::write_daily_record_csv(daily_path(cfg, asset.name), records);
        LLAB_INFO("liquidity " << asset.name << ": " << records.size() << " usable days, "
                               << unusable << " rejected");
    });
}

// Day-level cross-asset covariance of minute returns, scaled by the number
// of minutes, for each aligned date where all assets have a full grid.
std::vector<Eigen::MatrixXd> build_realized_cov(const RunConfig& cfg,
                                                const std::vector<EpochDay>& dates) {
    const std::size_t R = cfg.assets.size();
    std::vector<std::map<EpochDay, std::vector<double>>> by_asset(R);
    parallel_for(R, cfg.jobs, [&](std::size_t a) {
        auto bars = market_data::read_minute_csv(minutes_path(cfg, cfg.assets[a].name));
        auto& dest = by_asset[a];
        for (const auto& b : bars) dest[b.date].push_back(b.ret);
    });

    std::vector<Eigen::MatrixXd> cov(dates.size());
    parallel_for(dates.size(), cfg.jobs, [&](std::size_t di) {
        EpochDay d = dates[di];
        std::vector<const std::vector<double>*> cols(R);
        std::size_t T = 0;
        for (std::size_t a = 0; a < R; ++a) {
            auto it = by_asset[a].find(d);
            if (it == by_asset[a].end()) return;  // leave empty: engine falls back
            if (a == 0) T = it->second.size();
            if (it->second.size() != T || T == 0) return;
            cols[a] = &it->second;
        }
        Eigen::MatrixXd X(T, R);
        for (std::size_t a = 0; a < R; ++a) {
            for (std::size_t t = 0; t < T; ++t) X(t, a) = (*cols[a])[t];
        }
        Eigen::RowVectorXd m = X.colwise().mean();
        Eigen::MatrixXd centered = X.rowwise() - m;
        // (1/T) sum -> times T: the centered Gram matrix itself.
        cov[di] = centered.transpose() * centered;
    });
    return cov;
}

void stage_backtest(const RunConfig& cfg) {
    std::vector<std::vector<liquidity::DailyLiquidityRecord>> records;
    std::vector<std::vector<market_data::DailyAmountRow>> panels;
    for (const auto& asset : cfg.assets) {
        records.push_back(liquidity::read_daily_record_csv(daily_path(cfg, asset.name)));
        panels.push_back(market_data::read_daily_panel_csv(panels_path(cfg, asset.name)));
    }
    backtest::BacktestData data = backtest::align_market(records, panels);
    if (cfg.cov_mode == backtest::CovMode::kIntradayCovariance) {
        data.realized_cov = build_realized_cov(cfg, data.dates);
    }
    backtest::BacktestLedger ledger = backtest::run_backtest(data, cfg.backtest_config());

    std::string reports = cfg.out_dir + "/reports";
    ensure_dir(reports);
    backtest::ReportOptions ropts;
    ropts.beta_cap = cfg.beta_cap;
    backtest::write_reports(reports, data, ledger, ropts);
    LLAB_INFO("backtest: " << ledger.decision_dates.size() << " decision days, "
                           << ledger.held_rebalances << " held rebalances");
}

void write_manifest(const RunConfig& cfg) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["seed"] = cfg.seed;
    j["config_hash"] = fnv1a_hex(cfg.canonical_string());
    j["stages"]["market_data"] = cfg.hash_market_data();
    j["stages"]["liquidity"] = cfg.hash_liquidity();
    j["stages"]["backtest"] = cfg.hash_backtest();
    nlohmann::json assets = nlohmann::json::array();
    for (const auto& a : cfg.assets) assets.push_back(a.name);
    j["assets"] = assets;
    std::ofstream out(cfg.out_dir + "/manifest.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    ensure_dir(cfg.out_dir);
    std::error_code ec;
    fs::remove(cfg.out_dir + "/FAILED", ec);

    PipelineResult result;
    struct Stage {
        std::string name;
        std::string hash;
        std::vector<std::string> outputs;
        std::function<void()> run;
    };

    std::vector<std::string> md_outputs, lq_outputs;
    for (const auto& a : cfg.assets) {
        md_outputs.push_back(minutes_path(cfg, a.name));
        md_outputs.push_back(panels_path(cfg, a.name));
        lq_outputs.push_back(daily_path(cfg, a.name));
    }
    std::vector<std::string> bt_outputs = {cfg.out_dir + "/reports/summary.csv",
                                           cfg.out_dir + "/reports/performance.csv",
                                           cfg.out_dir + "/reports/equity_curves.csv"};

    std::vector<Stage> stages = {
        {"market_data", cfg.hash_market_data(), md_outputs, [&] { stage_market_data(cfg); }},
        {"liquidity", cfg.hash_liquidity(), lq_outputs, [&] { stage_liquidity(cfg); }},
        {"backtest", cfg.hash_backtest(), bt_outputs, [&] { stage_backtest(cfg); }},
    };

    for (auto& stage : stages) {
        StageReport rep;
        rep.name = stage.name;
        if (stage_cached(cfg.out_dir, stage.name, stage.hash, stage.outputs)) {
            rep.skipped = true;
            LLAB_INFO("stage " << stage.name << ": outputs up to date, skipped");
        } else {
            try {
                stage.run();
            } catch (const std::exception& e) {
                write_failure_marker(cfg.out_dir, stage.name, e.what());
                throw;
            }
            write_marker(cfg.out_dir, stage.name, stage.hash);
        }
        result.stages.push_back(rep);
    }

    write_manifest(cfg);
    result.manifest_path = cfg.out_dir + "/manifest.json";
    return result;
}

std::vector<std::string> list_csv_files(const std::string& dir) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            out.push_back(entry.path().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void cmd_ingest(const IngestArgs& args) {
    if (!fs::exists(args.ticks_path)) {
        throw std::invalid_argument("ticks file not found: " + args.ticks_path);
    }
    ensure_dir(args.out_dir);
    auto ingest = market_data::ingest_ticks(args.ticks_path, args.asset);
    auto bars = market_data::aggregate_minutes(ingest.ticks);
    bars = market_data::apply_wash_treatment(std::move(bars), args.wash);
    auto built = market_data::build_day_panels(bars);
    market_data::write_minute_csv(args.out_dir + "/" + args.asset + "_minutes.csv", bars);
    market_data::write_daily_panel_csv(args.out_dir + "/" + args.asset + "_panels.csv",
                                       built.panels);
    std::cout << "asset=" << args.asset << " days=" << built.panels.size()
              << " skipped_rows=" << ingest.skipped_rows
              << " dropped_partial_days=" << built.dropped_partial_days << "\n";
}

void cmd_compute_liquidity(const ComputeLiquidityArgs& args) {
    ensure_dir(args.out_dir);
    KeyedRng stream(args.seed);
    for (const auto& path : list_csv_files(args.minutes_dir)) {
        auto bars = market_data::read_minute_csv(path);
        if (bars.empty()) continue;
        auto built = market_data::build_day_panels(bars);
        std::vector<liquidity::DailyLiquidityRecord> records;
        std::size_t unusable = 0;
        for (const auto& panel : built.panels) {
            auto day = liquidity::process_day(panel, stream, args.beta_cap);
            if (day.usable) records.push_back(day.record);
            else ++unusable;
        }
        if (records.empty()) continue;
        std::string asset = records.front().asset;
        liquidity::write_daily_record_csv(args.out_dir + "/" + asset + ".csv", records);
        std::cout << "asset=" << asset << " days=" << records.size() << " rejected=" << unusable
                  << "\n";
    }
}

void cmd_fit(const FitArgs& args) {
    ensure_dir(args.out_dir);
    CsvWriter w(args.out_dir + "/forecasts.csv",
                "asset,date,mu_hat,sigma2_hat,model,p,q,vol_spec,la_mode,aic");
    for (const auto& path : list_csv_files(args.daily_dir)) {
        auto records = liquidity::read_daily_record_csv(path);
        const int n = static_cast<int>(records.size());
        if (n < args.window_days + 1) {
            LLAB_WARN("fit: " << path << " shorter than window, skipped");
            continue;
        }
        std::vector<double> y(n), beta(n);
        for (int i = 0; i < n; ++i) {
            y[i] = args.use_adjusted_series ? records[i].r_lq_tt : records[i].r_tt;
            beta[i] = records[i].beta_tt;
        }
        arga::ModelFit fit;
        int last_fit = -1;
        for (int t = args.window_days - 1; t + 1 < n; ++t) {
            const int lo = t - args.window_days + 1;
            std::vector<double> win(y.begin() + lo, y.begin() + t + 1);
            std::vector<double> win_beta(beta.begin() + lo, beta.begin() + t + 1);
            std::span<const double> beta_span =
                args.la_mode ? std::span<const double>(win_beta) : std::span<const double>();
            if (last_fit < 0 || t - last_fit >= args.refit_every) {
                arga::FitOptions fo;
                fo.p_max = args.p_max;
                fo.q_max = args.q_max;
                fo.mode = args.la_mode ? arga::VolMode::kLiquidityAdjusted
                                       : arga::VolMode::kStandard;
                fit = arga::fit_model(win, fo, beta_span);
                last_fit = t;
            }
            arga::Forecast fc = arga::forecast_one_step(fit, win, beta_span);
            w.write_row({records[t].asset, format_date(records[t + 1].date),
                         format_double(fc.mu_hat), format_double(fc.sigma2_hat),
                         "arma-" + arga::vol_spec_name(fit.vol.kind),
                         format_i64(fit.arma.spec.p), format_i64(fit.arma.spec.q),
                         arga::vol_spec_name(fit.vol.kind), args.la_mode ? "on" : "off",
                         format_double(fit.aic)});
        }
    }
}

void cmd_report(const ReportArgs& args) {
    CsvFile perf = read_csv(args.ledger_dir + "/performance.csv");
    int c_id = perf.column("portfolio_id");
    int c_rp = perf.column("r_p");
    if (c_id < 0 || c_rp < 0) throw std::invalid_argument("performance.csv missing columns");

    std::map<int, std::vector<double>> by_id;
    for (const auto& row : perf.rows) {
        by_id[static_cast<int>(parse_i64(row[c_id]))].push_back(parse_double(row[c_rp]));
    }

    const double ann = 365.0;
    if (args.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& [id, rp] : by_id) {
            double ann_ret = mean(rp) * ann;
            double ann_sd = stddev_pop(rp) * std::sqrt(ann);
            nlohmann::json row;
            row["portfolio_id"] = id;
            row["name"] = backtest::portfolio_name(id);
            row["ann_return"] = ann_ret;
            row["ann_sd"] = ann_sd;
            row["sharpe"] = ann_sd > 0 ? ann_ret / ann_sd : 0.0;
            row["n_days"] = rp.size();
            j.push_back(row);
        }
        std::cout << j.dump(2) << "\n";
    } else if (args.format == "csv") {
        std::cout << "portfolio_id,name,ann_return,ann_sd,sharpe,n_days\n";
        for (const auto& [id, rp] : by_id) {
            double ann_ret = mean(rp) * ann;
            double ann_sd = stddev_pop(rp) * std::sqrt(ann);
            double sharpe = ann_sd > 0 ? ann_ret / ann_sd : 0.0;
            std::cout << id << "," << backtest::portfolio_name(id) << ","
                      << format_double(ann_ret) << "," << format_double(ann_sd) << ","
                      << format_double(sharpe) << "," << rp.size() << "\n";
        }
    } else {
        throw std::invalid_argument("format must be csv|json");
    }
}

}  // namespace llab::pipeline
