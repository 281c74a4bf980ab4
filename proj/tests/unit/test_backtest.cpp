#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "llab/backtest/backtest.hpp"
#include "llab/core/csv.hpp"
#include "llab/synth/synth.hpp"

using namespace llab;
using namespace llab::backtest;

namespace {

BacktestData synthetic_market(int n_assets, int n_days, std::uint64_t seed) {
    synth::DailyMarketScenario sc;
    sc.assets.clear();
    for (int i = 0; i < n_assets; ++i) sc.assets.push_back("S" + std::to_string(i + 1));
    sc.n_days = n_days;
    sc.seed = seed;
    auto m = synth::generate_daily_market(sc);
    std::vector<std::vector<market_data::DailyAmountRow>> panels(n_assets);
    for (int a = 0; a < n_assets; ++a) {
        for (int d = 0; d < n_days; ++d) {
            panels[a].push_back({m.assets[a], m.dates[d], m.records[a][d].amount_tt,
                                 m.amount_raw[a][d]});
        }
    }
    return align_market(m.records, panels);
}

BacktestConfig fast_config() {
    BacktestConfig cfg;
    cfg.window_days = 40;
    cfg.portfolios = {1, 2, 3, 4, 5, 6};
    cfg.cov_mode = CovMode::kDailyOuterProduct;
    return cfg;
}

bool ledgers_identical(const BacktestLedger& a, const BacktestLedger& b) {
    if (a.portfolios.size() != b.portfolios.size()) return false;
    for (std::size_t i = 0; i < a.portfolios.size(); ++i) {
        const auto& pa = a.portfolios[i];
        const auto& pb = b.portfolios[i];
        if (pa.days.size() != pb.days.size()) return false;
        for (std::size_t d = 0; d < pa.days.size(); ++d) {
            if (pa.days[d].r_p != pb.days[d].r_p) return false;
            if (pa.days[d].equity != pb.days[d].equity) return false;
            if ((pa.days[d].weights - pb.days[d].weights).cwiseAbs().maxCoeff() != 0.0) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("align_market intersects dates and carries raw amounts") {
    liquidity::DailyLiquidityRecord r1{"A", 10, 0.01, 0.02, 0.5, 1e-4, 2e-4, 1.0, 100.0, false};
    liquidity::DailyLiquidityRecord r2 = r1;
    r2.date = 11;
    liquidity::DailyLiquidityRecord s1{"B", 11, -0.01, -0.02, 0.5, 1e-4, 2e-4, 1.0, 50.0, false};
    liquidity::DailyLiquidityRecord s2 = s1;
    s2.date = 12;
    std::vector<std::vector<liquidity::DailyLiquidityRecord>> records = {{r1, r2}, {s1, s2}};
    std::vector<std::vector<market_data::DailyAmountRow>> panels = {
        {{"A", 10, 100.0, 250.0}, {"A", 11, 100.0, 260.0}},
        {{"B", 11, 50.0, 130.0}, {"B", 12, 50.0, 140.0}}};
    auto data = align_market(records, panels);
    REQUIRE(data.dates.size() == 1);  // only day 11 is common
    CHECK(data.dates[0] == 11);
    CHECK(data.series[0].amount_raw[0] == 260.0);
    CHECK(data.series[1].amount_raw[0] == 130.0);
}

TEST_CASE("equal-weight portfolio holds constant weights") {
    auto data = synthetic_market(4, 70, 1);
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {1};
    auto ledger = run_backtest(data, cfg);
    REQUIRE(ledger.portfolios.size() == 1);
    REQUIRE(ledger.portfolios[0].days.size() == 70 - 40);
    for (const auto& day : ledger.portfolios[0].days) {
        CHECK(day.weights(0) == 0.0);
        for (int i = 1; i <= 4; ++i) CHECK(day.weights(i) == doctest::Approx(0.25));
    }
}

TEST_CASE("ledger equity follows the product rule and summary is recomputable") {
    auto data = synthetic_market(4, 90, 2);
    auto ledger = run_backtest(data, fast_config());
    for (const auto& pl : ledger.portfolios) {
        double eq = 1.0;
        std::vector<double> rp;
        for (const auto& day : pl.days) {
            eq *= (1.0 + day.r_p);
            CHECK(day.equity == doctest::Approx(eq).epsilon(1e-12));
            rp.push_back(day.r_p);
        }
        PortfolioLedger copy = pl;
        summarize_ledger(copy, 365.0);
        CHECK(copy.ann_return == doctest::Approx(pl.ann_return).epsilon(1e-10));
        CHECK(copy.ann_sd == doctest::Approx(pl.ann_sd).epsilon(1e-10));
        CHECK(copy.sharpe == doctest::Approx(pl.sharpe).epsilon(1e-10));
    }
}

TEST_CASE("same inputs and seed give bit-identical ledgers") {
    auto data = synthetic_market(3, 82, 3);
    BacktestConfig cfg = fast_config();
    cfg.window_days = 60;  // long enough for real model fits
    cfg.portfolios = {1, 2, 3, 4, 5, 6, 7, 8};
    cfg.p_max = 1;
    cfg.q_max = 1;
    cfg.refit_every = 10;
    auto l1 = run_backtest(data, cfg);
    auto l2 = run_backtest(data, cfg);
    CHECK(ledgers_identical(l1, l2));
    // and with parallel per-asset fitting
    cfg.jobs = 3;
    auto l3 = run_backtest(data, cfg);
    CHECK(ledgers_identical(l1, l3));
    // forecast tracks were populated by real fits
    REQUIRE(!l1.forecasts_std.empty());
    CHECK(!l1.forecasts_std[0].empty());
}

TEST_CASE("no look-ahead: truncating the future leaves decisions unchanged") {
    auto data = synthetic_market(3, 100, 4);
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {1, 3, 5, 7};
    cfg.p_max = 1;
    cfg.q_max = 0;
    cfg.refit_every = 7;
    auto full = run_backtest(data, cfg);

    BacktestData truncated = data;
    const std::size_t keep = 85;
    truncated.dates.resize(keep);
    for (auto& s : truncated.series) {
        s.r.resize(keep);
        s.r_lq.resize(keep);
        s.beta.resize(keep);
        s.var_tt.resize(keep);
        s.var_lq_tt.resize(keep);
        s.amount.resize(keep);
        s.amount_raw.resize(keep);
    }
    auto part = run_backtest(truncated, cfg);

    for (std::size_t p = 0; p < part.portfolios.size(); ++p) {
        const auto& days_full = full.portfolios[p].days;
        const auto& days_part = part.portfolios[p].days;
        REQUIRE(days_part.size() <= days_full.size());
        for (std::size_t d = 0; d < days_part.size(); ++d) {
            CHECK((days_full[d].weights - days_part[d].weights).cwiseAbs().maxCoeff() == 0.0);
            CHECK(days_full[d].r_p == days_part[d].r_p);
        }
    }
}

TEST_CASE("a stochastically dominant asset is capped by the optimizer") {
    auto data = synthetic_market(4, 120, 5);
    // make asset 1 dominate: large positive mean, everything else flat
    for (std::size_t d = 0; d < data.dates.size(); ++d) {
        data.series[0].r[d] = 0.02 + 0.001 * (d % 3);
        for (std::size_t a = 1; a < data.series.size(); ++a) {
            data.series[a].r[d] *= 0.05;
        }
    }
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {5};
    auto ledger = run_backtest(data, cfg);
    int capped_days = 0;
    for (const auto& day : ledger.portfolios[0].days) {
        if (day.weights(1) >= 0.300 - 1e-9) ++capped_days;
    }
    CHECK(capped_days > static_cast<int>(0.9 * ledger.portfolios[0].days.size()));
}

TEST_CASE("perfect foresight lifts the forecast portfolio above the moment portfolio") {
    auto data = synthetic_market(5, 110, 6);
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {5, 7};
    cfg.forecast_mode = ForecastMode::kPerfectForesight;
    auto ledger = run_backtest(data, cfg);
    const auto* p5 = &ledger.portfolios[0];
    const auto* p7 = &ledger.portfolios[1];
    if (p5->id != 5) std::swap(p5, p7);
    CHECK(p7->sharpe >= p5->sharpe);
}

TEST_CASE("missing decision inputs hold previous weights") {
    auto data = synthetic_market(3, 70, 7);
    const std::size_t bad = 55;  // inside the decision range
    data.series[1].beta[bad] = std::numeric_limits<double>::quiet_NaN();
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {3};
    auto ledger = run_backtest(data, cfg);
    CHECK(ledger.held_rebalances > 0);
    bool found_hold = false;
    const auto& days = ledger.portfolios[0].days;
    for (std::size_t d = 1; d < days.size(); ++d) {
        if (days[d].rebalance_held) {
            found_hold = true;
            CHECK((days[d].weights - days[d - 1].weights).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    CHECK(found_hold);
}

TEST_CASE("wash-style amount rescaling leaves return-driven portfolios unchanged") {
    auto data = synthetic_market(3, 80, 8);
    BacktestData scaled = data;
    // treated amounts change arbitrarily per asset; raw amounts and returns
    // stay put, as with the amount treatment
    for (std::size_t a = 0; a < scaled.series.size(); ++a) {
        for (double& v : scaled.series[a].amount) v *= (0.3 + 0.2 * a);
    }
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {1, 2, 5};
    auto l1 = run_backtest(data, cfg);
    auto l2 = run_backtest(scaled, cfg);
    // portfolio 1 and 5 identical, portfolio 2 differs
    for (std::size_t p = 0; p < l1.portfolios.size(); ++p) {
        const auto& a_days = l1.portfolios[p].days;
        const auto& b_days = l2.portfolios[p].days;
        bool identical = true;
        for (std::size_t d = 0; d < a_days.size(); ++d) {
            if ((a_days[d].weights - b_days[d].weights).cwiseAbs().maxCoeff() != 0.0) {
                identical = false;
            }
        }
        int id = l1.portfolios[p].id;
        if (id == 1 || id == 5) CHECK(identical);
        if (id == 2) CHECK(!identical);
    }
}

TEST_CASE("intraday covariance mode uses the supplied matrices") {
    auto data = synthetic_market(2, 60, 9);
    data.realized_cov.assign(data.dates.size(), Eigen::MatrixXd());
    for (std::size_t d = 0; d < data.dates.size(); ++d) {
        Eigen::MatrixXd c(2, 2);
        c << 4e-4, 1e-4, 1e-4, 9e-4;
        data.realized_cov[d] = c;
    }
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {1};
    cfg.cov_mode = CovMode::kIntradayCovariance;
    auto ledger = run_backtest(data, cfg);
    // equal weight 0.5/0.5 on the two risky assets
    double expect = 0.25 * 4e-4 + 0.25 * 9e-4 + 2 * 0.25 * 1e-4;
    for (const auto& day : ledger.portfolios[0].days) {
        CHECK(day.var_p == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("report bundle is written and the amount concentration is right") {
    auto data = synthetic_market(2, 70, 10);
    // craft asset 0 amounts: one dominant day carrying > 25% of total
    for (std::size_t d = 0; d < data.dates.size(); ++d) {
        data.series[0].amount[d] = (d == 10) ? 10.0 : 1.0;
        data.series[0].amount_raw[d] = 2.0 * data.series[0].amount[d];
    }
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {1, 5};
    auto ledger = run_backtest(data, cfg);

    auto dir = std::filesystem::temp_directory_path() / "llab_reports";
    std::filesystem::create_directories(dir);
    write_reports(dir.string(), data, ledger, ReportOptions{});
    for (const char* name :
         {"summary.csv", "beta_stats.csv", "amount_stats.csv", "return_stats.csv",
          "variance_stats.csv", "adf_rmse.csv", "equity_curves.csv", "weights.csv",
          "performance.csv", "forecasts.csv", "scatter_r_sigma_beta.csv", "beta_hist.csv"}) {
        CHECK(std::filesystem::exists(dir / name));
    }

    CsvFile amounts = read_csv((dir / "amount_stats.csv").string());
    int col = amounts.column("days_carrying_25pct");
    REQUIRE(col >= 0);
    // asset S1: total = 69 * 1 + 10 = 79; the top day carries 10/79 > 12.6%,
    // so 25% needs the top day plus some others; recompute the oracle here
    std::vector<double> v(data.dates.size(), 1.0);
    v[10] = 10.0;
    double total = 79.0, acc = 0.0;
    int k = 0;
    std::vector<double> sorted = v;
    std::sort(sorted.rbegin(), sorted.rend());
    for (double x : sorted) {
        acc += x;
        ++k;
        if (acc >= 0.25 * total) break;
    }
    CHECK(parse_i64(amounts.rows[0][col]) == k);
    std::filesystem::remove_all(dir);
}

TEST_CASE("beta stats count threshold days") {
    auto data = synthetic_market(1, 60, 11);
    for (std::size_t d = 0; d < data.dates.size(); ++d) data.series[0].beta[d] = 1.0;
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {1};
    auto ledger = run_backtest(data, cfg);
    auto dir = std::filesystem::temp_directory_path() / "llab_beta_stats";
    std::filesystem::create_directories(dir);
    write_beta_stats_csv((dir / "beta_stats.csv").string(), data, ReportOptions{});
    CsvFile f = read_csv((dir / "beta_stats.csv").string());
    REQUIRE(f.rows.size() == 1);
    CHECK(parse_i64(f.rows[0][f.column("days_ge_1")]) == 60);
    CHECK(parse_i64(f.rows[0][f.column("days_le_low")]) == 0);
    CHECK(parse_i64(f.rows[0][f.column("capped_days")]) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("toy amount concentration example") {
    // amounts [10, 1, 1, 1, 1]: the single top day already carries 10/14 >= 25%
    auto data = synthetic_market(1, 60, 12);
    BacktestConfig cfg = fast_config();
    cfg.portfolios = {1};
    for (std::size_t d = 0; d < data.dates.size(); ++d) {
        data.series[0].amount[d] = d < 5 ? (d == 0 ? 10.0 : 1.0) : 0.0;
        data.series[0].amount_raw[d] = data.series[0].amount[d] * 2.0;
    }
    auto dir = std::filesystem::temp_directory_path() / "llab_amt_stats";
    std::filesystem::create_directories(dir);
    write_amount_stats_csv((dir / "amount_stats.csv").string(), data);
    CsvFile f = read_csv((dir / "amount_stats.csv").string());
    CHECK(parse_i64(f.rows[0][f.column("days_carrying_25pct")]) == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config validation") {
    BacktestConfig cfg;
    cfg.window_days = 10;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = BacktestConfig{};
    cfg.portfolios = {9};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = BacktestConfig{};
    cfg.refit_every = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
