#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "llab/arga/adf.hpp"
#include "llab/core/rng.hpp"

using namespace llab;
using namespace llab::arga;

namespace {

std::vector<double> random_walk(int n, std::uint64_t seed) {
    KeyedRng rng = KeyedRng(seed).fork("rw");
    std::vector<double> y(n);
    double level = 0.0;
    for (int i = 0; i < n; ++i) {
        level += rng.normal();
        y[i] = level;
    }
    return y;
}

std::vector<double> white_noise(int n, std::uint64_t seed) {
    KeyedRng rng = KeyedRng(seed).fork("wn");
    std::vector<double> y(n);
    for (double& v : y) v = rng.normal();
    return y;
}

}  // namespace

TEST_CASE("p-value surface hits the anchors") {
    AdfCriticalValues cv;
    // build fake results by probing the surface through adf on crafted stats
    // is awkward; instead check via a series engineered around the mapping:
    // the mapping is exercised through adf_test below, so here use the
    // published anchor stats directly.
    // statistic == critical value => p == anchor level
    // (normal_cdf of the anchor quantile)
    CHECK(normal_cdf(-2.3263478740408408) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(normal_cdf(-1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(normal_cdf(-1.2815515655446004) == doctest::Approx(0.10).epsilon(1e-9));
    CHECK(cv.pct1 == -4.379);
    CHECK(cv.pct5 == -3.836);
    CHECK(cv.pct10 == -3.556);
}

TEST_CASE("white noise is decisively stationary") {
    auto y = white_noise(2000, 11);
    auto res = adf_test(y, 10);
    CHECK(res.statistic < -4.379);  // far below the 1% anchor
    CHECK(res.p_value < 0.01);
    CHECK(res.used_lag <= 10);
    CHECK(res.nobs == 2000 - res.used_lag - 1);
}

TEST_CASE("a random walk fails to reject the unit root") {
    int rejected = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        auto y = random_walk(2000, 100 + t);
        auto res = adf_test(y, 10);
        if (res.p_value < 0.05) ++rejected;
    }
    CHECK(rejected <= 2);
}

TEST_CASE("stationary ar1 is rejected at scale") {
    KeyedRng rng = KeyedRng(5).fork("ar");
    std::vector<double> y(2000);
    double prev = 0.0;
    for (double& v : y) {
        v = 0.5 * prev + rng.normal();
        prev = v;
    }
    auto res = adf_test(y, 10);
    CHECK(res.p_value < 0.01);
}

TEST_CASE("statistic below the 1 percent anchor is significant at 1 percent") {
    // engineered: white noise gives stats far below -4.379; the p-value must
    // land strictly under 0.01 whenever the statistic is under the anchor
    for (std::uint64_t seed : {21ULL, 22ULL, 23ULL}) {
        auto res = adf_test(white_noise(500, seed), 5);
        if (res.statistic < -4.379) CHECK(res.p_value < 0.01);
    }
}

TEST_CASE("p-value is monotone in the statistic") {
    // trending and persistent series produce a spread of statistics
    std::vector<std::pair<double, double>> points;
    for (int t = 0; t < 10; ++t) {
        auto rw = random_walk(400, 300 + t);
        auto res = adf_test(rw, 6);
        points.emplace_back(res.statistic, res.p_value);
        auto wn = white_noise(400, 400 + t);
        auto res2 = adf_test(wn, 6);
        points.emplace_back(res2.statistic, res2.p_value);
    }
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK(points[i].second >= points[i - 1].second - 1e-12);
    }
}

TEST_CASE("constant series is an error") {
    std::vector<double> y(100, 3.0);
    CHECK_THROWS_AS(adf_test(y, 4), std::invalid_argument);
}

TEST_CASE("short series is an error") {
    std::vector<double> y(12, 0.0);
    CHECK_THROWS_AS(adf_test(y, 4), std::invalid_argument);
}

TEST_CASE("lag selection responds to serial correlation in differences") {
    // an AR(2)-in-differences process needs augmentation lags
    KeyedRng rng = KeyedRng(6).fork("lagsel");
    std::vector<double> dy(2001);
    double prev = 0.0;
    for (double& v : dy) {
        v = 0.7 * prev + rng.normal();
        prev = v;
    }
    std::vector<double> y(2000);
    double level = 0.0;
    for (int i = 0; i < 2000; ++i) {
        level = 0.5 * level + dy[i];
        y[i] = level;
    }
    auto res = adf_test(y, 12);
    CHECK(res.used_lag >= 1);
}
