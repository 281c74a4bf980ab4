#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "llab/core/rng.hpp"
#include "llab/portfolio/portfolio.hpp"

using namespace llab;
using namespace llab::portfolio;

namespace {

Universe toy_universe(int n_risky) {
    Universe u;
    u.assets.push_back("USDT");
    for (int i = 0; i < n_risky; ++i) u.assets.push_back("A" + std::to_string(i + 1));
    u.risk_free_index = 0;
    return u;
}

// Exhaustive grid search over the capped simplex (risk-free absorbs the
// remainder); independent oracle for the quadratic program.
double grid_oracle(const MvProblem& p, double step) {
    const int n_risky = static_cast<int>(p.mu.size()) - 1;
    REQUIRE(n_risky == 3);
    const int steps = static_cast<int>(p.cap_risky / step + 0.5);
    double best = -1e300;
    Eigen::VectorXd w(4);
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; j <= steps; ++j) {
            for (int k = 0; k <= steps; ++k) {
                double w1 = i * step, w2 = j * step, w3 = k * step;
                double rf = 1.0 - w1 - w2 - w3;
                if (rf < -1e-12) continue;
                w << rf, w1, w2, w3;
                double obj = p.mu.dot(w) - 0.5 * p.lambda * w.dot(p.sigma * w);
                best = std::max(best, obj);
            }
        }
    }
    return best;
}

double objective(const MvProblem& p, const Eigen::VectorXd& w) {
    return p.mu.dot(w) - 0.5 * p.lambda * w.dot(p.sigma * w);
}

MvProblem random_problem(KeyedRng& rng) {
    MvProblem p;
    p.mu = Eigen::VectorXd::Zero(4);
    for (int i = 1; i < 4; ++i) p.mu(i) = 0.01 * rng.normal();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) A(i, j) = rng.normal();
    }
    Eigen::MatrixXd cov = A * A.transpose() * 1e-4;
    p.sigma = Eigen::MatrixXd::Zero(4, 4);
    p.sigma.bottomRightCorner(3, 3) = cov;
    p.lambda = 0.5 + 4.0 * rng.next_double();
    return p;
}

}  // namespace

TEST_CASE("equal benchmark weight") {
    Universe u = toy_universe(10);
    BenchmarkInputs in;
    auto res = benchmark_weights(BenchmarkKind::kEqual, u, in);
    CHECK(res.w(0) == 0.0);
    for (int i = 1; i <= 10; ++i) CHECK(res.w(i) == doctest::Approx(0.10));
}

TEST_CASE("liquidity benchmark weight is proportional to beta") {
    Universe u = toy_universe(2);
    BenchmarkInputs in;
    in.beta = {2.0, 1.0};
    auto res = benchmark_weights(BenchmarkKind::kLiquidity, u, in);
    CHECK(res.w(1) == doctest::Approx(2.0 / 3.0));
    CHECK(res.w(2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("equal betas collapse all beta weightings to equal weight") {
    Universe u = toy_universe(4);
    BenchmarkInputs in;
    in.beta = {1.3, 1.3, 1.3, 1.3};
    auto lq = benchmark_weights(BenchmarkKind::kLiquidity, u, in);
    auto inv = benchmark_weights(BenchmarkKind::kInverseLiquidity, u, in);
    for (int i = 1; i <= 4; ++i) {
        CHECK(lq.w(i) == doctest::Approx(0.25));
        CHECK(inv.w(i) == doctest::Approx(0.25));
    }
}

TEST_CASE("inverse mode excludes zero beta with reallocation") {
    Universe u = toy_universe(3);
    BenchmarkInputs in;
    in.beta = {0.0, 1.0, 1.0};
    auto res = benchmark_weights(BenchmarkKind::kInverseLiquidity, u, in);
    CHECK(res.excluded_zero_beta);
    CHECK(res.w(1) == 0.0);
    CHECK(res.w(2) == doctest::Approx(0.5));
    CHECK(res.w(3) == doctest::Approx(0.5));
}

TEST_CASE("market benchmark weight follows amounts") {
    Universe u = toy_universe(2);
    BenchmarkInputs in;
    in.amount = {300.0, 100.0};
    auto res = benchmark_weights(BenchmarkKind::kMarket, u, in);
    CHECK(res.w(1) == doctest::Approx(0.75));
    CHECK(res.w(2) == doctest::Approx(0.25));
}

TEST_CASE("risk aversion hand value and floor") {
    std::vector<double> win(100);
    // mean 0.002, population variance 0.001: alternate 0.002 +- sqrt(0.001)
    double s = std::sqrt(0.001);
    for (std::size_t i = 0; i < win.size(); ++i) win[i] = 0.002 + (i % 2 ? s : -s);
    auto res = risk_aversion(win, 0.1);
    CHECK(res.lambda == doctest::Approx(2.0));
    CHECK(!res.floored);

    for (std::size_t i = 0; i < win.size(); ++i) win[i] = -0.002 + (i % 2 ? s : -s);
    auto neg = risk_aversion(win, 0.1);
    CHECK(neg.lambda == 0.1);
    CHECK(neg.floored);
}

TEST_CASE("risk aversion rejects degenerate windows") {
    std::vector<double> constant(50, 0.01);
    CHECK_THROWS_AS(risk_aversion(constant, 0.1), std::invalid_argument);
    std::vector<double> tiny(10, 0.01);
    CHECK_THROWS_AS(risk_aversion(tiny, 0.1), std::invalid_argument);
}

TEST_CASE("zero expected returns put everything in the risk-free asset") {
    MvProblem p;
    p.mu = Eigen::VectorXd::Zero(4);
    p.sigma = Eigen::MatrixXd::Identity(4, 4) * 1e-4;
    p.sigma(0, 0) = 0.0;
    p.lambda = 2.0;
    auto w = solve_mv(p);
    CHECK(w(0) == doctest::Approx(1.0));
    CHECK(kkt_residual(p, w) < 1e-6);
}

TEST_CASE("a dominant asset is pushed to its cap") {
    MvProblem p;
    p.mu = Eigen::VectorXd::Zero(4);
    p.mu(1) = 10.0;  // overwhelming expected return
    p.sigma = Eigen::MatrixXd::Identity(4, 4) * 1e-3;
    p.sigma(0, 0) = 0.0;
    p.lambda = 1.0;
    SolveInfo info;
    auto w = solve_mv(p, &info);
    CHECK(w(1) == doctest::Approx(0.300));
    CHECK(info.kkt_residual < 1e-6);
    CHECK(grid_oracle(p, 0.005) <= objective(p, w) + 1e-3);
}

TEST_CASE("vanishing risk aversion fills caps greedily by expected return") {
    MvProblem p;
    p.mu = Eigen::VectorXd::Zero(4);
    p.mu(1) = 0.03;
    p.mu(2) = 0.02;
    p.mu(3) = 0.01;
    p.sigma = Eigen::MatrixXd::Identity(4, 4) * 1e-4;
    p.sigma(0, 0) = 0.0;
    p.lambda = 1e-6;
    auto w = solve_mv(p);
    CHECK(w(1) == doctest::Approx(0.300).epsilon(1e-6));
    CHECK(w(2) == doctest::Approx(0.300).epsilon(1e-6));
    CHECK(w(3) == doctest::Approx(0.300).epsilon(1e-6));
    CHECK(w(0) == doctest::Approx(0.100).epsilon(1e-6));
    CHECK(grid_oracle(p, 0.005) <= objective(p, w) + 1e-3);
}

TEST_CASE("solver beats the grid oracle on random problems") {
    KeyedRng rng = KeyedRng(31).fork("qp");
    for (int trial = 0; trial < 20; ++trial) {
        MvProblem p = random_problem(rng);
        SolveInfo info;
        auto w = solve_mv(p, &info);
        // feasibility
        CHECK(std::abs(w.sum() - 1.0) < 1e-8);
        for (int i = 0; i < 4; ++i) CHECK(w(i) >= -1e-10);
        for (int i = 1; i < 4; ++i) CHECK(w(i) <= 0.300 + 1e-10);
        CHECK(w(0) <= 1.0 + 1e-10);
        CHECK(info.kkt_residual <= 1e-6);
        CHECK(objective(p, w) >= grid_oracle(p, 0.005) - 1e-3);
    }
}

TEST_CASE("monotone response to an expected-return bump") {
    KeyedRng rng = KeyedRng(32).fork("mono");
    for (int trial = 0; trial < 10; ++trial) {
        MvProblem p = random_problem(rng);
        auto w0 = solve_mv(p);
        MvProblem p2 = p;
        p2.mu(2) += 0.005;
        auto w1 = solve_mv(p2);
        if (w0(2) < 0.300 - 1e-9 && w1(2) < 0.300 - 1e-9) {
            CHECK(w1(2) >= w0(2) - 1e-8);
        }
    }
}

TEST_CASE("argmax is invariant to joint mu and inverse-lambda scaling") {
    KeyedRng rng = KeyedRng(33).fork("scale");
    for (int trial = 0; trial < 10; ++trial) {
        MvProblem p = random_problem(rng);
        auto w0 = solve_mv(p);
        MvProblem p2 = p;
        const double c = 3.7;
        p2.mu *= c;
        p2.lambda *= c;  // objective scales by c; argmax unchanged
        auto w1 = solve_mv(p2);
        for (int i = 0; i < 4; ++i) CHECK(w1(i) == doctest::Approx(w0(i)).epsilon(1e-6));
    }
}

TEST_CASE("covariance with negative eigenvalues is clipped, not rejected") {
    MvProblem p;
    p.mu = Eigen::VectorXd::Zero(4);
    p.mu(1) = 0.01;
    p.sigma = Eigen::MatrixXd::Zero(4, 4);
    // indefinite block
    p.sigma(1, 1) = 1e-4;
    p.sigma(2, 2) = 1e-4;
    p.sigma(1, 2) = p.sigma(2, 1) = 2e-4;
    p.sigma(3, 3) = 1e-4;
    p.lambda = 1.0;
    auto w = solve_mv(p);
    CHECK(std::abs(w.sum() - 1.0) < 1e-8);
}

TEST_CASE("problem validation rejects bad inputs") {
    MvProblem p;
    p.mu = Eigen::VectorXd::Zero(3);
    p.sigma = Eigen::MatrixXd::Identity(3, 3);
    p.lambda = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.lambda = 1.0;
    p.sigma(0, 1) = 0.5;  // asymmetric
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("realized performance projections") {
    Eigen::VectorXd w(3), r(3);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
    w << 0.0, 1.0, 0.0;
    r << 0.0, 0.02, -0.01;
    cov(1, 1) = 4e-4;
    auto rec = realized_performance(w, r, cov);
    CHECK(rec.r_p == doctest::Approx(0.02));
    CHECK(rec.var_p == doctest::Approx(4e-4));
    CHECK(rec.sd_p == doctest::Approx(0.02));
    CHECK(rec.ann_return == doctest::Approx(0.02 * 365.0));
    CHECK(rec.ann_sd == doctest::Approx(0.02 * std::sqrt(365.0)));
}

TEST_CASE("all-cash portfolio earns nothing and risks nothing") {
    Eigen::VectorXd w(3), r(3);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3) * 1e-4;
    cov(0, 0) = 0.0;
    w << 1.0, 0.0, 0.0;
    r << 0.0, 0.05, -0.03;
    auto rec = realized_performance(w, r, cov);
    CHECK(rec.r_p == 0.0);
    CHECK(rec.var_p == 0.0);
    CHECK(rec.sharpe == 0.0);
}

TEST_CASE("sharpe identity") {
    KeyedRng rng = KeyedRng(34).fork("sharpe");
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd w(4), r(4);
        w << 0.1, 0.3, 0.3, 0.3;
        for (int i = 0; i < 4; ++i) r(i) = 0.01 * rng.normal();
        r(0) = 0.0;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
        for (int i = 1; i < 4; ++i) {
            for (int j = 1; j < 4; ++j) A(i, j) = rng.normal();
        }
        Eigen::MatrixXd cov = A * A.transpose() * 1e-5;
        auto rec = realized_performance(w, r, cov);
        CHECK(rec.sharpe * rec.ann_sd == doctest::Approx(rec.ann_return).epsilon(1e-10));
    }
    // hand value: annual return 1.0 on annual sd 0.5 -> sharpe 2
    Eigen::VectorXd w(2), r(2);
    w << 0.0, 1.0;
    r << 0.0, 1.0 / 365.0;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(1, 1) = 0.25 / 365.0;
    auto rec = realized_performance(w, r, cov);
    CHECK(rec.ann_return == doctest::Approx(1.0));
    CHECK(rec.ann_sd == doctest::Approx(0.5));
    CHECK(rec.sharpe == doctest::Approx(2.0));
}

TEST_CASE("universe validation") {
    Universe u = toy_universe(3);
    u.validate();
    u.assets.push_back("A1");  // duplicate
    CHECK_THROWS_AS(u.validate(), std::invalid_argument);
}
