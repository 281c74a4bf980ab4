// liquidity_lab.cpp - batch CLI: ingest trades, compute liquidity measures,
// fit forecasting models, run the portfolio backtest, and emit reports.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "llab/core/log.hpp"
#include "llab/pipeline/config.hpp"
#include "llab/pipeline/pipeline.hpp"
#include "llab/synth/synth.hpp"

using namespace llab;

int main(int argc, char** argv) {
    CLI::App app{"liquidity measures, liquidity-adjusted volatility models, and "
                 "mean-variance backtests over trade data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pipeline::kVersion);

    std::string log_level = "warn";
    unsigned jobs = 1;
    app.add_option("--log-level", log_level, "error|warn|info|debug")->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads for per-asset stages")->capture_default_str();

    // ingest ------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "ticks -> minute bars and daily panels");
    pipeline::IngestArgs ingest_args;
    std::string wash_flag = "on", scope_flag = "full";
    ingest->add_option("--ticks", ingest_args.ticks_path, "tick CSV path")->required();
    ingest->add_option("--asset", ingest_args.asset, "asset identifier")->required();
    ingest->add_option("--wash", wash_flag, "on|off")->capture_default_str();
    ingest->add_option("--q3", ingest_args.wash.q3_factor, "third quartile band multiplier")
        ->capture_default_str();
    ingest->add_option("--q4", ingest_args.wash.q4_factor, "top band multiplier")
        ->capture_default_str();
    ingest->add_option("--scope", scope_flag, "quantile scope: full|day")->capture_default_str();
    ingest->add_option("--out", ingest_args.out_dir, "output directory")->required();

    // compute-liquidity ---------------------------------------------------
    auto* liq = app.add_subcommand("compute-liquidity",
                                   "minute bars -> daily liquidity records");
    pipeline::ComputeLiquidityArgs liq_args;
    liq->add_option("--minutes", liq_args.minutes_dir, "directory of minute CSVs")->required();
    liq->add_option("--seed", liq_args.seed, "seed for the zero-return fix")->required();
    liq->add_option("--beta-cap", liq_args.beta_cap, "daily beta cap")->capture_default_str();
    liq->add_option("--out", liq_args.out_dir, "output directory")->required();

    // fit -----------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "rolling one-step forecasts from daily records");
    pipeline::FitArgs fit_args;
    std::string series_flag = "r", la_flag = "off";
    fit->add_option("--daily", fit_args.daily_dir, "directory of daily record CSVs")->required();
    fit->add_option("--series", series_flag, "r|r_lq")->capture_default_str();
    fit->add_option("--la", la_flag, "liquidity-adjusted recursions: on|off")
        ->capture_default_str();
    fit->add_option("--window", fit_args.window_days, "rolling window length")
        ->capture_default_str();
    fit->add_option("--pmax", fit_args.p_max, "max AR order")->capture_default_str();
    fit->add_option("--qmax", fit_args.q_max, "max MA order")->capture_default_str();
    fit->add_option("--refit-every", fit_args.refit_every, "refit cadence in days")
        ->capture_default_str();
    fit->add_option("--out", fit_args.out_dir, "output directory")->required();

    // backtest --------------------------------------------------------------
    auto* bt = app.add_subcommand("backtest", "full pipeline driven by a run configuration");
    std::string bt_config, bt_out;
    std::uint64_t bt_seed = 0;
    bool bt_seed_set = false;
    bt->add_option("--config", bt_config, "run configuration file")->required();
    bt->add_option("--out", bt_out, "override out_dir from the configuration");
    bt->add_option("--seed", bt_seed, "override seed from the configuration")
        ->each([&](const std::string&) { bt_seed_set = true; });

    // report ----------------------------------------------------------------
    auto* rep = app.add_subcommand("report", "recompute the summary from a ledger directory");
    pipeline::ReportArgs rep_args;
    rep->add_option("--ledger", rep_args.ledger_dir, "directory containing performance.csv")
        ->required();
    rep->add_option("--format", rep_args.format, "csv|json")->capture_default_str();

    // synth -------------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic tick files");
    synth::TickScenario scenario;
    std::string scenario_flag = "regimes";
    std::string synth_out;
    int synth_n_assets = 1;
    synth_cmd->add_option("--scenario", scenario_flag, "constant|regimes|heavytail")
        ->capture_default_str();
    synth_cmd->add_option("--assets", synth_n_assets, "number of assets (named SYN01..)")
        ->capture_default_str();
    synth_cmd->add_option("--days", scenario.n_days, "full trading days")->capture_default_str();
    synth_cmd->add_option("--seed", scenario.seed, "scenario seed")->required();
    synth_cmd->add_option("--minute-vol", scenario.minute_vol, "per-minute return scale")
        ->capture_default_str();
    synth_cmd->add_option("--amount-sigma", scenario.amount_sigma, "lognormal amount dispersion")
        ->capture_default_str();
    synth_cmd->add_option("--regime-prob", scenario.regime_prob, "heavy-trading day probability")
        ->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        set_log_level(parse_log_level(log_level));

        if (*ingest) {
            ingest_args.wash.enabled = wash_flag == "on";
            ingest_args.wash.scope = scope_flag == "day" ? market_data::QuantileScope::kPerDay
                                                         : market_data::QuantileScope::kFullSample;
            pipeline::cmd_ingest(ingest_args);
        } else if (*liq) {
            pipeline::cmd_compute_liquidity(liq_args);
        } else if (*fit) {
            fit_args.use_adjusted_series = series_flag == "r_lq";
            fit_args.la_mode = la_flag == "on";
            pipeline::cmd_fit(fit_args);
        } else if (*bt) {
            pipeline::RunConfig cfg = pipeline::parse_config_file(bt_config);
            if (!bt_out.empty()) cfg.out_dir = bt_out;
            if (bt_seed_set) {
                cfg.seed = bt_seed;
                cfg.seed_set = true;
            }
            if (jobs > 1) cfg.jobs = jobs;
            auto result = pipeline::run_pipeline(cfg);
            for (const auto& stage : result.stages) {
                std::cout << "stage " << stage.name << ": "
                          << (stage.skipped ? "skipped" : "ran") << "\n";
            }
            std::cout << "manifest: " << result.manifest_path << "\n";
        } else if (*rep) {
            pipeline::cmd_report(rep_args);
        } else if (*synth_cmd) {
            scenario.kind = synth::parse_scenario(scenario_flag);
            scenario.assets.clear();
            for (int i = 0; i < synth_n_assets; ++i) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "SYN%02d", i + 1);
                scenario.assets.push_back(buf);
            }
            std::filesystem::create_directories(synth_out);
            auto paths = synth::generate_tick_files(scenario, synth_out);
            for (const auto& p : paths) std::cout << p << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
