// portfolio.hpp - constrained mean-variance allocation and performance.
//
// The allocation problem maximizes mu'w - (lambda/2) w'Sigma w over the
// polytope { sum w = 1, w >= 0, risky w <= cap, cash w <= 1 } where the cash
// asset (a stablecoin) is treated as risk free with zero return. Solved
// with a primal active-set method on the exact KKT system; the small
// universe makes each subproblem a dense solve.
#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace llab::portfolio {

struct Universe {
    std::vector<std::string> assets;  // risk-free asset included
    int risk_free_index = 0;

    int size() const { return static_cast<int>(assets.size()); }
    int risky_count() const { return size() - 1; }
    void validate() const;  // unique ids, risk_free_index in range
};

struct MvProblem {
    Eigen::VectorXd mu;     // expected daily returns, risk-free entry 0
    Eigen::MatrixXd sigma;  // symmetric PSD covariance, risk-free row/col 0
    double lambda = 1.0;    // risk aversion, > 0
    double cap_risky = 0.300;
    int risk_free_index = 0;

    void validate() const;  // throws std::invalid_argument
};

struct SolveInfo {
    int iterations = 0;
    double kkt_residual = 0;
    bool ridge_applied = false;
};

// Returns the optimal weights; all constraints hold to 1e-8 and the KKT
// residual is reported. Clips negative covariance eigenvalues to zero first.
Eigen::VectorXd solve_mv(const MvProblem& problem, SolveInfo* info = nullptr);

// Largest complementarity/stationarity violation of `w` for the problem.
double kkt_residual(const MvProblem& problem, const Eigen::VectorXd& w);

enum class BenchmarkKind { kEqual, kMarket, kLiquidity, kInverseLiquidity };

struct BenchmarkInputs {
    std::vector<double> beta;    // per risky asset, aligned with universe order
    std::vector<double> amount;  // per risky asset
};

struct BenchmarkResult {
    Eigen::VectorXd w;
    bool excluded_zero_beta = false;  // inverse mode dropped a zero-beta asset
};

// Weights over the full universe (risk-free entry zero), normalized to sum
// one across the risky assets.
BenchmarkResult benchmark_weights(BenchmarkKind kind, const Universe& universe,
                                  const BenchmarkInputs& in);

struct RiskAversionResult {
    double lambda = 0;
    bool floored = false;
};

// lambda = mean / population variance of the trailing market returns,
// floored at lambda_min. Throws on zero variance or a short window.
RiskAversionResult risk_aversion(std::span<const double> market_returns, double lambda_min = 0.1,
                                 std::size_t min_window = 30);

struct PerfRecord {
    double r_p = 0;      // realized daily portfolio return
    double var_p = 0;    // realized daily portfolio variance
    double sd_p = 0;
    double ann_return = 0;
    double ann_var = 0;
    double ann_sd = 0;
    double sharpe = 0;   // ann_return / ann_sd, 0 when ann_sd == 0
};

// realized_cov is the day-ahead asset covariance in daily units (already
// scaled to the day); annualization multiplies returns by `periods` and
// standard deviations by sqrt(periods).
PerfRecord realized_performance(const Eigen::VectorXd& weights,
                                const Eigen::VectorXd& realized_returns,
                                const Eigen::MatrixXd& realized_cov, double periods = 365.0);

}  // namespace llab::portfolio
