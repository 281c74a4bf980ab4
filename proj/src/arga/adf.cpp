#include "llab/arga/adf.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace llab::arga {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Normal quantiles for the 1% / 5% / 10% anchors.
constexpr double kZ01 = -2.3263478740408408;
constexpr double kZ05 = -1.6448536269514722;
constexpr double kZ10 = -1.2815515655446004;

struct Ols {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    double ssr = 0;
    double loglik = 0;
    double aic = 0;
};

Ols ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto n = X.rows();
    const auto k = X.cols();
    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw std::invalid_argument("adf: singular regression (degenerate series)");
    }
    Ols o;
    o.coef = ldlt.solve(X.transpose() * y);
    Eigen::VectorXd resid = y - X * o.coef;
    o.ssr = resid.squaredNorm();
    if (!(o.ssr >= 0.0) || !std::isfinite(o.ssr)) {
        throw std::invalid_argument("adf: non-finite regression residuals");
    }
    double s2 = o.ssr / static_cast<double>(n - k);
    if (!(s2 > 0.0)) throw std::invalid_argument("adf: zero residual variance");
    Eigen::MatrixXd xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    o.se.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) o.se(j) = std::sqrt(s2 * xtx_inv(j, j));
    double sig2_ml = o.ssr / static_cast<double>(n);
    o.loglik = -0.5 * static_cast<double>(n) * (std::log(kTwoPi) + std::log(sig2_ml) + 1.0);
    o.aic = 2.0 * static_cast<double>(k) - 2.0 * o.loglik;
    return o;
}

// Regressors: [1, trend, y_{t-1}, dy_{t-1}, ..., dy_{t-lag}] for t in
// [start, n). dy holds first differences, so row t uses dy[t] as response.
void build_regression(std::span<const double> y, const std::vector<double>& dy, int lag,
                      std::size_t start, Eigen::MatrixXd& X, Eigen::VectorXd& resp) {
    const std::size_t n = dy.size();  // dy[t] = y[t+1] - y[t]
    const std::size_t rows = n - start;
    X.resize(static_cast<Eigen::Index>(rows), 3 + lag);
    resp.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t t = start; t < n; ++t) {
        Eigen::Index r = static_cast<Eigen::Index>(t - start);
        resp(r) = dy[t];
        X(r, 0) = 1.0;
        X(r, 1) = static_cast<double>(t + 1);
        X(r, 2) = y[t];
        for (int j = 1; j <= lag; ++j) X(r, 2 + j) = dy[t - j];
    }
}

double p_value_from_surface(double stat, const AdfCriticalValues& cv) {
    // Piecewise-linear in (statistic -> normal quantile) through the three
    // anchors, extrapolated with the boundary slopes.
    const double t1 = cv.pct1, t5 = cv.pct5, t10 = cv.pct10;
    const double slope_lo = (kZ05 - kZ01) / (t5 - t1);
    const double slope_hi = (kZ10 - kZ05) / (t10 - t5);
    double z = (stat <= t5) ? kZ01 + slope_lo * (stat - t1) : kZ05 + slope_hi * (stat - t5);
    return normal_cdf(z);
}

}  // namespace

AdfResult adf_test(std::span<const double> y, int max_lag, const AdfCriticalValues& critical) {
    if (max_lag < 0) throw std::invalid_argument("adf: negative max_lag");
    const std::size_t n = y.size();
    if (n <= static_cast<std::size_t>(max_lag) + 10) {
        throw std::invalid_argument("adf: series too short for max_lag");
    }

    std::vector<double> dy(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) dy[t] = y[t + 1] - y[t];

    // Lag selection on the common sample implied by max_lag.
    Eigen::MatrixXd X;
    Eigen::VectorXd resp;
    int best_lag = 0;
    double best_aic = 0;
    bool have_best = false;
    for (int lag = 0; lag <= max_lag; ++lag) {
        build_regression(y, dy, lag, static_cast<std::size_t>(max_lag), X, resp);
        Ols o = ols(X, resp);
        if (!have_best || o.aic < best_aic) {
            best_aic = o.aic;
            best_lag = lag;
            have_best = true;
        }
    }

    // Final regression uses the longest sample the chosen lag allows.
    build_regression(y, dy, best_lag, static_cast<std::size_t>(best_lag), X, resp);
    Ols o = ols(X, resp);

    AdfResult res;
    res.statistic = o.coef(2) / o.se(2);
    res.p_value = p_value_from_surface(res.statistic, critical);
    res.used_lag = best_lag;
    res.nobs = static_cast<int>(resp.size());
    res.best_ic = best_aic;
    res.critical = critical;
    return res;
}

}  // namespace llab::arga
