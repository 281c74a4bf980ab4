#include "llab/market_data/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "llab/core/csv.hpp"
#include "llab/core/log.hpp"
#include "llab/core/stats.hpp"

namespace llab::market_data {

void WashPolicy::validate() const {
    if (!(q4_factor > 0.0 && q4_factor <= q3_factor && q3_factor <= 1.0)) {
        throw std::invalid_argument("wash policy requires 0 < q4_factor <= q3_factor <= 1");
    }
}

IngestResult ingest_ticks(const std::string& path, const std::string& asset) {
    CsvFile f = read_csv(path);
    int c_asset = f.column("asset");
    int c_ts = f.column("ts_ms");
    int c_price = f.column("price");
    int c_qty = f.column("qty");
    int c_amount = f.column("amount");
    if (c_asset < 0 || c_ts < 0 || c_price < 0 || c_qty < 0) {
        throw std::runtime_error("tick file missing required columns (asset,ts_ms,price,qty): " +
                                 path);
    }

    IngestResult out;
    out.ticks.reserve(f.rows.size());
    for (const auto& row : f.rows) {
        if (row.size() < f.header.size()) {
            ++out.skipped_rows;
            continue;
        }
        if (row[c_asset] != asset) continue;
        TickRecord t;
        t.asset = asset;
        try {
            t.ts_ms = parse_i64(row[c_ts]);
            t.price = parse_double(row[c_price]);
            t.qty = parse_double(row[c_qty]);
            t.amount = (c_amount >= 0) ? parse_double(row[c_amount]) : t.price * t.qty;
        } catch (const std::invalid_argument&) {
            ++out.skipped_rows;
            continue;
        }
        if (!(t.price > 0.0) || !(t.qty > 0.0) || !std::isfinite(t.amount)) {
            ++out.skipped_rows;
            continue;
        }
        out.ticks.push_back(std::move(t));
    }
    if (out.ticks.empty()) {
        throw std::runtime_error("no valid ticks for asset '" + asset + "' in " + path);
    }
    std::stable_sort(out.ticks.begin(), out.ticks.end(),
                     [](const TickRecord& a, const TickRecord& b) { return a.ts_ms < b.ts_ms; });
    if (out.skipped_rows > 0) {
        LLAB_WARN("ingest " << asset << ": skipped " << out.skipped_rows << " rows");
    }
    return out;
}

std::vector<MinuteBar> aggregate_minutes(const std::vector<TickRecord>& ticks,
                                         int minutes_per_day) {
    if (ticks.empty()) throw std::invalid_argument("aggregate_minutes: empty input");
    if (minutes_per_day <= 0) throw std::invalid_argument("minutes_per_day must be positive");

    const std::int64_t ms_per_minute = kMsPerDay / kMinutesPerDay;
    auto floor_div = [](std::int64_t a, std::int64_t b) {
        std::int64_t q = a / b;
        if (a % b != 0 && ((a < 0) != (b < 0))) --q;
        return q;
    };
    // Global minute index; days are fixed-length grids of minutes_per_day.
    auto slot_of = [&](std::int64_t ts) { return floor_div(ts, ms_per_minute); };

    // Last trade price and summed amount per traded minute.
    std::map<std::int64_t, std::pair<double, double>> traded;  // slot -> (close, amount)
    for (const auto& t : ticks) {
        auto& cell = traded[slot_of(t.ts_ms)];
        cell.first = t.price;  // ticks are time-sorted, so last write wins
        cell.second += t.amount;
    }

    std::int64_t first = traded.begin()->first;
    std::int64_t last = traded.rbegin()->first;
    const std::string& asset = ticks.front().asset;

    std::vector<MinuteBar> bars;
    bars.reserve(static_cast<std::size_t>(last - first + 1));
    double prev_close = 0.0;
    for (std::int64_t slot = first; slot <= last; ++slot) {
        MinuteBar b;
        b.asset = asset;
        b.date = floor_div(slot, minutes_per_day);
        b.minute = static_cast<int>(slot - b.date * minutes_per_day);
        auto it = traded.find(slot);
        if (it != traded.end()) {
            b.close = it->second.first;
            b.amount_raw = it->second.second;
            b.ret = (slot == first) ? 0.0 : (b.close - prev_close) / prev_close;
        } else {
            b.close = prev_close;
            b.amount_raw = 0.0;
            b.ret = 0.0;
        }
        b.amount_treated = b.amount_raw;
        prev_close = b.close;
        bars.push_back(std::move(b));
    }
    return bars;
}

namespace {

struct Thresholds {
    double q2 = 0, q3 = 0;
    bool valid = false;
};

Thresholds amount_thresholds(const std::vector<const MinuteBar*>& bars) {
    std::vector<double> positive;
    positive.reserve(bars.size());
    for (const auto* b : bars) {
        if (b->amount_raw > 0.0) positive.push_back(b->amount_raw);
    }
    Thresholds t;
    if (positive.size() < 2) return t;
    t.q2 = quantile(positive, 0.50);
    t.q3 = quantile(std::move(positive), 0.75);
    t.valid = true;
    return t;
}

void scale_band(MinuteBar& b, const Thresholds& t, const WashPolicy& p) {
    if (!t.valid || b.amount_raw <= 0.0) return;
    if (b.amount_raw >= t.q3) {
        b.amount_treated = b.amount_raw * p.q4_factor;
    } else if (b.amount_raw >= t.q2) {
        b.amount_treated = b.amount_raw * p.q3_factor;
    }
}

}  // namespace

std::vector<MinuteBar> apply_wash_treatment(std::vector<MinuteBar> bars,
                                            const WashPolicy& policy) {
    policy.validate();
    for (auto& b : bars) b.amount_treated = b.amount_raw;
    if (!policy.enabled || bars.empty()) return bars;

    if (policy.scope == QuantileScope::kFullSample) {
        std::vector<const MinuteBar*> all;
        all.reserve(bars.size());
        for (const auto& b : bars) all.push_back(&b);
        Thresholds t = amount_thresholds(all);
        for (auto& b : bars) scale_band(b, t, policy);
    } else {
        std::map<EpochDay, std::vector<const MinuteBar*>> by_day;
        for (const auto& b : bars) by_day[b.date].push_back(&b);
        std::map<EpochDay, Thresholds> thresholds;
        for (const auto& [day, group] : by_day) thresholds[day] = amount_thresholds(group);
        for (auto& b : bars) scale_band(b, thresholds[b.date], policy);
    }
    return bars;
}

PanelBuildResult build_day_panels(const std::vector<MinuteBar>& bars, int minutes_per_day) {
    PanelBuildResult out;
    std::map<EpochDay, std::vector<MinuteBar>> by_day;
    for (const auto& b : bars) by_day[b.date].push_back(b);

    for (auto& [day, group] : by_day) {
        if (static_cast<int>(group.size()) != minutes_per_day) {
            ++out.dropped_partial_days;
            continue;
        }
        std::sort(group.begin(), group.end(),
                  [](const MinuteBar& a, const MinuteBar& b) { return a.minute < b.minute; });
        DayPanel p;
        p.asset = group.front().asset;
        p.date = day;
        p.minutes = std::move(group);
        for (const auto& m : p.minutes) {
            p.amount_tt += m.amount_treated;
            p.amount_tt_raw += m.amount_raw;
        }
        out.panels.push_back(std::move(p));
    }
    if (out.dropped_partial_days > 0) {
        LLAB_INFO("dropped " << out.dropped_partial_days << " partial boundary day(s)");
    }
    return out;
}

void write_minute_csv(const std::string& path, const std::vector<MinuteBar>& bars) {
    CsvWriter w(path, "asset,date,minute,close,return,amount_raw,amount_treated");
    for (const auto& b : bars) {
        w.write_row({b.asset, format_date(b.date), format_i64(b.minute), format_double(b.close),
                     format_double(b.ret), format_double(b.amount_raw),
                     format_double(b.amount_treated)});
    }
}

std::vector<MinuteBar> read_minute_csv(const std::string& path) {
    CsvFile f = read_csv(path);
    int ca = f.column("asset"), cd = f.column("date"), cm = f.column("minute");
    int cc = f.column("close"), cr = f.column("return");
    int craw = f.column("amount_raw"), ct = f.column("amount_treated");
    if (ca < 0 || cd < 0 || cm < 0 || cc < 0 || cr < 0 || craw < 0 || ct < 0) {
        throw std::runtime_error("bad minute CSV header: " + path);
    }
    std::vector<MinuteBar> bars;
    bars.reserve(f.rows.size());
    for (const auto& row : f.rows) {
        MinuteBar b;
        b.asset = row[ca];
        b.date = parse_date(row[cd]);
        b.minute = static_cast<int>(parse_i64(row[cm]));
        b.close = parse_double(row[cc]);
        b.ret = parse_double(row[cr]);
        b.amount_raw = parse_double(row[craw]);
        b.amount_treated = parse_double(row[ct]);
        bars.push_back(std::move(b));
    }
    return bars;
}

void write_daily_panel_csv(const std::string& path, const std::vector<DayPanel>& panels) {
    CsvWriter w(path, "asset,date,amount_tt,amount_tt_raw");
    for (const auto& p : panels) {
        w.write_row({p.asset, format_date(p.date), format_double(p.amount_tt),
                     format_double(p.amount_tt_raw)});
    }
}

std::vector<DailyAmountRow> read_daily_panel_csv(const std::string& path) {
    CsvFile f = read_csv(path);
    int ca = f.column("asset"), cd = f.column("date");
    int ct = f.column("amount_tt"), cr = f.column("amount_tt_raw");
    if (ca < 0 || cd < 0 || ct < 0 || cr < 0) {
        throw std::runtime_error("bad daily panel CSV header: " + path);
    }
    std::vector<DailyAmountRow> rows;
    rows.reserve(f.rows.size());
    for (const auto& row : f.rows) {
        rows.push_back({row[ca], parse_date(row[cd]), parse_double(row[ct]),
                        parse_double(row[cr])});
    }
    return rows;
}

}  // namespace llab::market_data
