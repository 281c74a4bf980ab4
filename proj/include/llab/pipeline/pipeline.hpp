// pipeline.hpp - stage orchestration: ingest -> liquidity -> backtest/report.
//
// Each stage writes its outputs under out_dir plus a marker file holding the
// hash of the configuration slice it depends on; a rerun with an unchanged
// hash and intact outputs skips the stage. A failed stage leaves partial
// outputs in place together with a FAILED marker naming the stage.
#pragma once

#include <string>
#include <vector>

#include "llab/pipeline/config.hpp"

namespace llab::pipeline {

struct StageReport {
    std::string name;
    bool skipped = false;
};

struct PipelineResult {
    std::vector<StageReport> stages;
    std::string manifest_path;
};

// Runs all stages in dependency order. Throws on the first stage failure
// after writing the failure marker.
PipelineResult run_pipeline(const RunConfig& config);

// Single-stage drivers behind the CLI subcommands.

struct IngestArgs {
    std::string ticks_path;
    std::string asset;
    market_data::WashPolicy wash;
    std::string out_dir;
};
void cmd_ingest(const IngestArgs& args);

struct ComputeLiquidityArgs {
    std::string minutes_dir;  // directory of minute CSVs, one per asset
    std::uint64_t seed = 0;
    double beta_cap = 10.0;
    std::string out_dir;
};
void cmd_compute_liquidity(const ComputeLiquidityArgs& args);

struct FitArgs {
    std::string daily_dir;  // directory of daily record CSVs
    bool use_adjusted_series = false;  // fit r_lq instead of r
    bool la_mode = false;
    int window_days = 365;
    int p_max = 4;
    int q_max = 4;
    int refit_every = 1;
    std::string out_dir;
};
void cmd_fit(const FitArgs& args);

struct ReportArgs {
    std::string ledger_dir;  // directory containing performance.csv
    std::string format = "csv";  // csv | json
};
// Recomputes the per-portfolio summary from the daily performance rows and
// prints it to stdout.
void cmd_report(const ReportArgs& args);

// Lists CSV files in a directory, sorted by filename.
std::vector<std::string> list_csv_files(const std::string& dir);

}  // namespace llab::pipeline
