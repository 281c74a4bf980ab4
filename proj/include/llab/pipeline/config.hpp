// config.hpp - declarative run configuration for the batch pipeline.
//
// Flat key = value lines plus one [asset <ID>] section per asset. The seed
// is mandatory; there is no entropy fallback anywhere in the pipeline.
// Hashes cover only semantically relevant fields so cosmetic edits (jobs,
// log level, comments) do not invalidate cached stage outputs.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llab/backtest/backtest.hpp"
#include "llab/core/dates.hpp"
#include "llab/market_data/market_data.hpp"

namespace llab::pipeline {

inline constexpr const char* kVersion = "0.1.0";

struct AssetConfig {
    std::string name;
    std::string ticks_path;
};

struct RunConfig {
    std::vector<AssetConfig> assets;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;

    market_data::WashPolicy wash;
    double beta_cap = 10.0;
    int window_days = 365;
    int p_max = 2;
    int q_max = 2;
    double lambda_min = 0.1;
    double annualization = 365.0;
    std::vector<int> portfolios = {1, 2, 3, 4, 5, 6, 7, 8};
    backtest::CovMode cov_mode = backtest::CovMode::kIntradayCovariance;
    backtest::ForecastMode forecast_mode = backtest::ForecastMode::kModel;
    int refit_every = 1;
    bool market_weights_use_treated = true;
    std::optional<EpochDay> date_start;
    std::optional<EpochDay> date_end;
    unsigned jobs = 1;

    backtest::BacktestConfig backtest_config() const;

    // Throws std::invalid_argument with a description of the first problem.
    void validate() const;

    // Canonical "key=value" serialization of the semantic fields, and FNV
    // hashes of the serialization restricted to each stage's inputs.
    std::string canonical_string() const;
    std::string hash_market_data() const;
    std::string hash_liquidity() const;
    std::string hash_backtest() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<inline>");

std::string fnv1a_hex(const std::string& s);

}  // namespace llab::pipeline
