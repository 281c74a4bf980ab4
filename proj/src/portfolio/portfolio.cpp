#include "llab/portfolio/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>

#include "llab/core/stats.hpp"

namespace llab::portfolio {

void Universe::validate() const {
    if (assets.size() < 2) throw std::invalid_argument("universe needs >= 2 assets");
    std::set<std::string> uniq(assets.begin(), assets.end());
    if (uniq.size() != assets.size()) throw std::invalid_argument("duplicate asset ids");
    if (risk_free_index < 0 || risk_free_index >= size()) {
        throw std::invalid_argument("risk_free_index out of range");
    }
}

void MvProblem::validate() const {
    const auto n = mu.size();
    if (n < 2 || sigma.rows() != n || sigma.cols() != n) {
        throw std::invalid_argument("mv problem: dimension mismatch");
    }
    if (risk_free_index < 0 || risk_free_index >= n) {
        throw std::invalid_argument("mv problem: risk_free_index out of range");
    }
    if (!(lambda > 0.0)) throw std::invalid_argument("mv problem: lambda must be positive");
    if (!(cap_risky > 0.0)) throw std::invalid_argument("mv problem: cap must be positive");
    double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw std::invalid_argument("mv problem: covariance not symmetric");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sigma(i, i) < -1e-12) throw std::invalid_argument("mv problem: negative variance");
    }
    // Upper bounds must add up to at least one for the simplex to be reachable.
    double total_cap = 1.0 + cap_risky * static_cast<double>(n - 1);
    if (total_cap < 1.0 - 1e-12) throw std::invalid_argument("mv problem: caps infeasible");
}

namespace {

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& sigma) {
    Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.eigenvalues().minCoeff() >= 0.0) return sym;
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

struct Bounds {
    Eigen::VectorXd lo, hi;
};

Bounds make_bounds(const MvProblem& p) {
    const auto n = p.mu.size();
    Bounds b{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Constant(n, p.cap_risky)};
    b.hi(p.risk_free_index) = 1.0;
    return b;
}

// Working-set codes: 0 free, -1 at lower bound, +1 at upper bound.
Eigen::VectorXd solve_eqp(const Eigen::MatrixXd& Q, const Eigen::VectorXd& mu,
                          const std::vector<int>& state, const Eigen::VectorXd& w,
                          const Bounds& bounds, double* nu_out, bool* ridge_used) {
    const auto n = mu.size();
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (state[i] == 0) free.push_back(i);
    }
    double fixed_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (state[i] == -1) fixed_sum += bounds.lo(i);
        if (state[i] == +1) fixed_sum += bounds.hi(i);
    }
    Eigen::VectorXd out = w;
    const auto m = static_cast<Eigen::Index>(free.size());
    if (m == 0) {
        *nu_out = 0.0;
        return out;
    }

    Eigen::MatrixXd K(m + 1, m + 1);
    Eigen::VectorXd rhs(m + 1);
    for (Eigen::Index a = 0; a < m; ++a) {
        double fixed_term = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state[i] == -1) fixed_term += Q(free[a], i) * bounds.lo(i);
            if (state[i] == +1) fixed_term += Q(free[a], i) * bounds.hi(i);
        }
        rhs(a) = mu(free[a]) - fixed_term;
        for (Eigen::Index b = 0; b < m; ++b) K(a, b) = Q(free[a], free[b]);
        K(a, m) = 1.0;
        K(m, a) = 1.0;
    }
    K(m, m) = 0.0;
    rhs(m) = 1.0 - fixed_sum;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    Eigen::VectorXd sol;
    if (lu.isInvertible()) {
        sol = lu.solve(rhs);
    } else {
        // Degenerate covariance block; a tiny ridge restores uniqueness
        // without materially moving the optimum.
        *ridge_used = true;
        double ridge = 1e-10 * std::max(1.0, Q.diagonal().maxCoeff());
        Eigen::MatrixXd K2 = K;
        for (Eigen::Index a = 0; a < m; ++a) K2(a, a) += ridge;
        sol = Eigen::FullPivLU<Eigen::MatrixXd>(K2).solve(rhs);
    }
    for (Eigen::Index a = 0; a < m; ++a) out(free[a]) = sol(a);
    *nu_out = sol(m);
    return out;
}

}  // namespace

double kkt_residual(const MvProblem& problem, const Eigen::VectorXd& w) {
    const auto n = problem.mu.size();
    Bounds bounds = make_bounds(problem);
    Eigen::VectorXd g = problem.lambda * (problem.sigma * w) - problem.mu;  // gradient of -objective

    const double bound_tol = 1e-9;
    // Feasibility contributes directly to the residual.
    double res = std::abs(w.sum() - 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        res = std::max(res, bounds.lo(i) - w(i));
        res = std::max(res, w(i) - bounds.hi(i));
    }

    // Pick the multiplier for the budget constraint from the free
    // coordinates; fall back to the feasible interval midpoint.
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i) > bounds.lo(i) + bound_tol && w(i) < bounds.hi(i) - bound_tol) free.push_back(i);
    }
    double nu;
    if (!free.empty()) {
        nu = 0.0;
        for (auto i : free) nu += g(i);
        nu /= static_cast<double>(free.size());
    } else {
        double lo = -1e300, hi = 1e300;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w(i) <= bounds.lo(i) + bound_tol) hi = std::min(hi, g(i));
            else lo = std::max(lo, g(i));
        }
        nu = (std::max(lo, -1e300) + std::min(hi, 1e300)) / 2.0;
        if (!std::isfinite(nu)) nu = 0.0;
    }

    for (auto i : free) res = std::max(res, std::abs(g(i) - nu));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i) <= bounds.lo(i) + bound_tol) res = std::max(res, nu - g(i));  // want g >= nu
        else if (w(i) >= bounds.hi(i) - bound_tol) res = std::max(res, g(i) - nu);
    }
    return res;
}

Eigen::VectorXd solve_mv(const MvProblem& problem_in, SolveInfo* info) {
    MvProblem problem = problem_in;
    problem.validate();
    problem.sigma = clip_psd(problem.sigma);
    const auto n = problem.mu.size();
    Bounds bounds = make_bounds(problem);
    Eigen::MatrixXd Q = problem.lambda * problem.sigma;

    // Feasible start: everything in the risk-free asset.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    w(problem.risk_free_index) = 1.0;
    std::vector<int> state(n, -1);
    state[problem.risk_free_index] = 0;

    SolveInfo local;
    const int max_iters = 50 * static_cast<int>(n) + 100;
    for (int iter = 0; iter < max_iters; ++iter) {
        local.iterations = iter + 1;
        double nu = 0.0;
        Eigen::VectorXd target = solve_eqp(Q, problem.mu, state, w, bounds, &nu,
                                           &local.ridge_applied);
        Eigen::VectorXd d = target - w;
        double dmax = d.cwiseAbs().maxCoeff();

        if (dmax < 1e-12) {
            // At the working-set optimum; check bound multipliers.
            Eigen::VectorXd g = Q * w - problem.mu;
            double worst = -1e-10;
            Eigen::Index worst_i = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (state[i] == -1) {
                    double mult = g(i) - nu;  // must be >= 0
                    if (mult < worst) {
                        worst = mult;
                        worst_i = i;
                    }
                } else if (state[i] == +1) {
                    double mult = nu - g(i);  // must be >= 0
                    if (mult < worst) {
                        worst = mult;
                        worst_i = i;
                    }
                }
            }
            if (worst_i < 0) break;  // KKT satisfied
            state[worst_i] = 0;
            continue;
        }

        // Step to the target, stopping at the first blocking bound.
        double alpha = 1.0;
        Eigen::Index block = -1;
        int block_side = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (state[i] != 0 || d(i) == 0.0) continue;
            if (d(i) < 0.0) {
                double a = (bounds.lo(i) - w(i)) / d(i);
                if (a < alpha) {
                    alpha = a;
                    block = i;
                    block_side = -1;
                }
            } else {
                double a = (bounds.hi(i) - w(i)) / d(i);
                if (a < alpha) {
                    alpha = a;
                    block = i;
                    block_side = +1;
                }
            }
        }
        w += alpha * d;
        if (block >= 0) {
            state[block] = block_side;
            w(block) = block_side < 0 ? bounds.lo(block) : bounds.hi(block);
        }
    }

    // Snap to the box and budget at machine precision.
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::clamp(w(i), bounds.lo(i), bounds.hi(i));
    local.kkt_residual = kkt_residual(problem, w);
    if (info) *info = local;
    return w;
}

BenchmarkResult benchmark_weights(BenchmarkKind kind, const Universe& universe,
                                  const BenchmarkInputs& in) {
    universe.validate();
    const int n = universe.size();
    const int n_risky = universe.risky_count();
    BenchmarkResult out;
    out.w = Eigen::VectorXd::Zero(n);

    std::vector<double> score(n_risky, 0.0);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        if (i == universe.risk_free_index) continue;
        switch (kind) {
            case BenchmarkKind::kEqual:
                score[k] = 1.0;
                break;
            case BenchmarkKind::kMarket:
                score[k] = in.amount.at(k);
                break;
            case BenchmarkKind::kLiquidity:
                score[k] = in.beta.at(k);
                break;
            case BenchmarkKind::kInverseLiquidity: {
                double b = in.beta.at(k);
                if (b <= 0.0) {
                    score[k] = 0.0;  // excluded; remaining assets absorb the mass
                    out.excluded_zero_beta = true;
                } else {
                    score[k] = 1.0 / b;
                }
                break;
            }
        }
        ++k;
    }
    double total = 0.0;
    for (double s : score) total += s;
    if (!(total > 0.0)) throw std::invalid_argument("benchmark_weights: degenerate scores");

    k = 0;
    for (int i = 0; i < n; ++i) {
        if (i == universe.risk_free_index) continue;
        out.w(i) = score[k] / total;
        ++k;
    }
    return out;
}

RiskAversionResult risk_aversion(std::span<const double> market_returns, double lambda_min,
                                 std::size_t min_window) {
    if (market_returns.size() < min_window) {
        throw std::invalid_argument("risk_aversion: window too short");
    }
    double m = mean(market_returns);
    double v = variance_pop(market_returns);
    // constant windows land at rounding-noise variance, not exactly zero
    if (!(v > 1e-30 * (1.0 + m * m))) {
        throw std::invalid_argument("risk_aversion: zero market variance");
    }
    RiskAversionResult out;
    out.lambda = m / v;
    if (out.lambda < lambda_min) {
        out.lambda = lambda_min;
        out.floored = true;
    }
    return out;
}

PerfRecord realized_performance(const Eigen::VectorXd& weights,
                                const Eigen::VectorXd& realized_returns,
                                const Eigen::MatrixXd& realized_cov, double periods) {
    const auto n = weights.size();
    if (realized_returns.size() != n || realized_cov.rows() != n || realized_cov.cols() != n) {
        throw std::invalid_argument("realized_performance: dimension mismatch");
    }
    PerfRecord rec;
    rec.r_p = realized_returns.dot(weights);
    rec.var_p = std::max(0.0, weights.dot(realized_cov * weights));
    rec.sd_p = std::sqrt(rec.var_p);
    rec.ann_return = rec.r_p * periods;
    rec.ann_var = rec.var_p * periods;
    rec.ann_sd = rec.sd_p * std::sqrt(periods);
    rec.sharpe = rec.ann_sd > 0.0 ? rec.ann_return / rec.ann_sd : 0.0;
    return rec;
}

}  // namespace llab::portfolio
