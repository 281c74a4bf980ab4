// market_data.hpp - raw trades -> minute bars -> treated day panels.
//
// The ingestion path is file based: one tick CSV per asset, aggregated to a
// fixed grid of minute bars per UTC day, with trading amounts optionally
// reduced in the upper quantile bands to strip suspected wash volume.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llab/core/dates.hpp"

namespace llab::market_data {

struct TickRecord {
    std::string asset;
    std::int64_t ts_ms = 0;  // UTC milliseconds since epoch
    double price = 0;        // quote currency per base unit, > 0
    double qty = 0;          // base units, > 0
    double amount = 0;       // quote currency, price * qty
};

struct MinuteBar {
    std::string asset;
    EpochDay date = 0;
    int minute = 0;            // 0 .. minutes_per_day-1
    double close = 0;          // last trade price, carried forward over gaps
    double ret = 0;            // simple return vs previous minute close
    double amount_raw = 0;     // summed quote amount in the minute
    double amount_treated = 0; // post wash-treatment amount
};

enum class QuantileScope { kFullSample, kPerDay };

struct WashPolicy {
    bool enabled = true;
    double q3_factor = 0.5;   // multiplier for amounts in [Q2, Q3)
    double q4_factor = 0.25;  // multiplier for amounts >= Q3
    QuantileScope scope = QuantileScope::kFullSample;

    void validate() const;  // throws std::invalid_argument
};

struct DayPanel {
    std::string asset;
    EpochDay date = 0;
    std::vector<MinuteBar> minutes;  // full trading day, minute order
    double amount_tt = 0;            // sum of treated amounts
    double amount_tt_raw = 0;        // sum of raw amounts
};

struct IngestResult {
    std::vector<TickRecord> ticks;  // sorted ascending by ts_ms
    std::size_t skipped_rows = 0;   // malformed or non-positive price/qty
};

// Reads the tick CSV (header: asset,ts_ms,price,qty[,amount]) and returns
// time-sorted records for `asset`. Rows whose asset column differs are
// ignored; malformed and non-positive rows are counted as skipped. When the
// amount column is absent the amount is recomputed as price * qty.
// Throws std::runtime_error on an unreadable file or zero valid rows.
IngestResult ingest_ticks(const std::string& path, const std::string& asset);

// One bar per minute from the first traded minute to the last, gap minutes
// carrying the previous close with zero return and zero amount. The first
// bar of the whole sample has ret = 0. Throws on empty input.
std::vector<MinuteBar> aggregate_minutes(const std::vector<TickRecord>& ticks,
                                         int minutes_per_day = kMinutesPerDay);

// Scales amount_treated in the upper quantile bands. Quantile thresholds are
// computed over positive-amount minutes only, either over the whole sample
// or per day. Band edges are left-closed: [Q2, Q3) and [Q3, max]. Returns
// and raw amounts are untouched; disabled policy is the identity.
std::vector<MinuteBar> apply_wash_treatment(std::vector<MinuteBar> bars, const WashPolicy& policy);

struct PanelBuildResult {
    std::vector<DayPanel> panels;
    std::size_t dropped_partial_days = 0;  // boundary days without a full grid
};

// Groups treated bars into per-day panels, keeping only days with the full
// minute grid. Partial first/last days are dropped and counted.
PanelBuildResult build_day_panels(const std::vector<MinuteBar>& bars,
                                  int minutes_per_day = kMinutesPerDay);

// Minute CSV persistence (header: asset,date,minute,close,return,amount_raw,amount_treated).
void write_minute_csv(const std::string& path, const std::vector<MinuteBar>& bars);
std::vector<MinuteBar> read_minute_csv(const std::string& path);

// Daily panel CSV (header: asset,date,amount_tt,amount_tt_raw).
void write_daily_panel_csv(const std::string& path, const std::vector<DayPanel>& panels);

struct DailyAmountRow {
    std::string asset;
    EpochDay date = 0;
    double amount_tt = 0;
    double amount_tt_raw = 0;
};
std::vector<DailyAmountRow> read_daily_panel_csv(const std::string& path);

}  // namespace llab::market_data
