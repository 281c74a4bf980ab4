#include "llab/liquidity/liquidity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "llab/core/csv.hpp"
#include "llab/core/stats.hpp"

namespace llab::liquidity {

ZeroFixResult fix_zero_returns(std::span<const double> returns, double mean_abs,
                               const KeyedRng& day_stream) {
    if (!(mean_abs > 0.0)) {
        throw std::invalid_argument("fix_zero_returns: day mean |r| must be positive");
    }
    ZeroFixResult out;
    out.returns.assign(returns.begin(), returns.end());
    for (std::size_t i = 0; i < out.returns.size(); ++i) {
        if (out.returns[i] != 0.0) continue;
        KeyedRng mr = day_stream.fork(static_cast<std::uint64_t>(i));
        double s = mr.sign();
        double u = mr.uniform(0.5, 1.0);
        out.returns[i] = s * u * 1e-2 * mean_abs;
        ++out.fixed_count;
    }
    return out;
}

IlliquidityResult minute_illiquidity(std::span<const double> fixed_returns,
                                     std::span<const double> amounts) {
    if (fixed_returns.size() != amounts.size()) {
        throw std::invalid_argument("minute_illiquidity: length mismatch");
    }
    if (fixed_returns.empty()) throw std::invalid_argument("minute_illiquidity: empty day");

    double min_positive = std::numeric_limits<double>::infinity();
    for (double a : amounts) {
        if (a > 0.0 && a < min_positive) min_positive = a;
    }
    if (!std::isfinite(min_positive)) {
        throw std::invalid_argument("minute_illiquidity: no positive amounts in day");
    }
    const double substitute = min_positive * 1e-2;

    IlliquidityResult out;
    std::vector<double> a(amounts.begin(), amounts.end());
    for (double& v : a) {
        if (v <= 0.0) {
            v = substitute;
            ++out.zero_amounts_substituted;
        }
    }

    double mean_abs_r = 0.0, mean_a = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (fixed_returns[i] == 0.0) {
            throw std::invalid_argument("minute_illiquidity: zero return present (fix first)");
        }
        mean_abs_r += std::abs(fixed_returns[i]);
        mean_a += a[i];
    }
    mean_abs_r /= static_cast<double>(a.size());
    mean_a /= static_cast<double>(a.size());

    out.ell.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.ell[i] = (std::abs(fixed_returns[i]) / mean_abs_r) / (a[i] / mean_a);
        if (!(out.ell[i] > 0.0) || !std::isfinite(out.ell[i])) {
            throw std::invalid_argument("minute_illiquidity: non-finite ell");
        }
    }
    return out;
}

DayNormalization day_normalize(std::span<const double> ell) {
    if (ell.empty()) throw std::invalid_argument("day_normalize: empty");
    double sum = 0.0;
    for (double e : ell) {
        if (!(e > 0.0)) throw std::invalid_argument("day_normalize: ell must be positive");
        sum += e;
    }
    DayNormalization out;
    out.eta = static_cast<double>(ell.size()) / sum;
    out.ell_T.resize(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i) out.ell_T[i] = out.eta * ell[i];
    return out;
}

std::vector<MinuteLiquidity> minute_beta_and_adjusted_return(std::span<const double> fixed_returns,
                                                             const std::vector<double>& ell,
                                                             const DayNormalization& norm) {
    if (fixed_returns.size() != norm.ell_T.size() || ell.size() != norm.ell_T.size()) {
        throw std::invalid_argument("minute_beta_and_adjusted_return: length mismatch");
    }
    std::vector<MinuteLiquidity> out(norm.ell_T.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double sqrt_ell_T = std::sqrt(norm.ell_T[i]);
        out[i].ell_t = ell[i];
        out[i].ell_T = norm.ell_T[i];
        out[i].beta_t = 1.0 / sqrt_ell_T;
        out[i].r_lq = sqrt_ell_T * fixed_returns[i];
    }
    return out;
}

DailyLiquidityRecord daily_aggregate(const std::vector<MinuteLiquidity>& minutes,
                                     std::span<const double> fixed_returns, double beta_cap) {
    if (minutes.size() != fixed_returns.size() || minutes.empty()) {
        throw std::invalid_argument("daily_aggregate: length mismatch or empty");
    }
    DailyLiquidityRecord rec;
    std::vector<double> r_lq(minutes.size());
    for (std::size_t i = 0; i < minutes.size(); ++i) {
        rec.r_tt += fixed_returns[i];
        r_lq[i] = minutes[i].r_lq;
        rec.r_lq_tt += r_lq[i];
    }
    if (rec.r_lq_tt == 0.0) {
        rec.beta_tt = beta_cap;
        rec.beta_capped = true;
    } else {
        double ratio = std::abs(rec.r_tt / rec.r_lq_tt);
        rec.beta_capped = ratio > beta_cap;
        rec.beta_tt = rec.beta_capped ? beta_cap : ratio;
    }
    const double n = static_cast<double>(minutes.size());
    rec.var_tt = n * variance_pop(fixed_returns);
    rec.var_lq_tt = n * variance_pop(r_lq);
    return rec;
}

double weighted_day_variance(std::span<const double> ell_T, std::span<const double> returns) {
    if (ell_T.size() != returns.size() || returns.empty()) {
        throw std::invalid_argument("weighted_day_variance: length mismatch or empty");
    }
    double rbar = mean(returns);
    double s = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        double d = returns[i] - rbar;
        s += ell_T[i] * d * d;
    }
    return s / static_cast<double>(returns.size());
}

double adjusted_day_variance_scaled_mean(std::span<const double> ell_T,
                                         std::span<const double> returns) {
    if (ell_T.size() != returns.size() || returns.empty()) {
        throw std::invalid_argument("adjusted_day_variance_scaled_mean: length mismatch or empty");
    }
    double rbar = mean(returns);
    double s = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        double w = std::sqrt(ell_T[i]);
        double d = w * returns[i] - w * rbar;
        s += d * d;
    }
    return s / static_cast<double>(returns.size());
}

DayLiquidity process_day(const market_data::DayPanel& panel, const KeyedRng& stream,
                         double beta_cap) {
    DayLiquidity out;
    std::vector<double> r, a;
    r.reserve(panel.minutes.size());
    a.reserve(panel.minutes.size());
    for (const auto& m : panel.minutes) {
        r.push_back(m.ret);
        a.push_back(m.amount_treated);
    }

    double mean_abs = 0.0;
    for (double x : r) mean_abs += std::abs(x);
    mean_abs /= static_cast<double>(r.empty() ? 1 : r.size());
    if (!(mean_abs > 0.0)) {
        out.reason = "all-zero returns";
        return out;
    }

    KeyedRng day_stream =
        stream.fork("zero-return-fix").fork(panel.asset).fork(static_cast<std::uint64_t>(panel.date));
    ZeroFixResult fixed = fix_zero_returns(r, mean_abs, day_stream);
    out.zero_returns_fixed = fixed.fixed_count;

    IlliquidityResult ill;
    try {
        ill = minute_illiquidity(fixed.returns, a);
    } catch (const std::invalid_argument& e) {
        out.reason = e.what();
        return out;
    }
    out.zero_amounts_substituted = ill.zero_amounts_substituted;

    DayNormalization norm = day_normalize(ill.ell);
    out.minutes = minute_beta_and_adjusted_return(fixed.returns, ill.ell, norm);
    out.record = daily_aggregate(out.minutes, fixed.returns, beta_cap);
    out.record.asset = panel.asset;
    out.record.date = panel.date;
    out.record.eta_t = norm.eta;
    out.record.amount_tt = panel.amount_tt;
    out.usable = true;
    return out;
}

void write_daily_record_csv(const std::string& path,
                            const std::vector<DailyLiquidityRecord>& records) {
    CsvWriter w(path, "asset,date,r_tt,r_lq_tt,beta_tt,var_tt,var_lq_tt,eta_t,amount_tt");
    for (const auto& r : records) {
        w.write_row({r.asset, format_date(r.date), format_double(r.r_tt), format_double(r.r_lq_tt),
                     format_double(r.beta_tt), format_double(r.var_tt), format_double(r.var_lq_tt),
                     format_double(r.eta_t), format_double(r.amount_tt)});
    }
}

std::vector<DailyLiquidityRecord> read_daily_record_csv(const std::string& path) {
    CsvFile f = read_csv(path);
    const char* cols[] = {"asset", "date",      "r_tt",  "r_lq_tt",  "beta_tt",
                          "var_tt", "var_lq_tt", "eta_t", "amount_tt"};
    int idx[9];
    for (int i = 0; i < 9; ++i) {
        idx[i] = f.column(cols[i]);
        if (idx[i] < 0) throw std::runtime_error("bad daily record CSV header: " + path);
    }
    std::vector<DailyLiquidityRecord> out;
    out.reserve(f.rows.size());
    for (const auto& row : f.rows) {
        DailyLiquidityRecord r;
        r.asset = row[idx[0]];
        r.date = parse_date(row[idx[1]]);
        r.r_tt = parse_double(row[idx[2]]);
        r.r_lq_tt = parse_double(row[idx[3]]);
        r.beta_tt = parse_double(row[idx[4]]);
        r.var_tt = parse_double(row[idx[5]]);
        r.var_lq_tt = parse_double(row[idx[6]]);
        r.eta_t = parse_double(row[idx[7]]);
        r.amount_tt = parse_double(row[idx[8]]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace llab::liquidity
