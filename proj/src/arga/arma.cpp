#include "llab/arga/arma.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "llab/core/stats.hpp"

namespace llab::arga {

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

std::vector<double> pacf_to_coeffs(std::span<const double> raw) {
    // Reflection coefficients are kept strictly inside (-1, 1): tanh
    // saturates to +-1 in floating point for |x| > ~19, which would put a
    // root on the unit circle and blow up the residual recursion. The margin
    // also keeps the inverse recursion well conditioned.
    constexpr double kMaxReflection = 0.9999;
    const std::size_t k = raw.size();
    std::vector<double> cur, prev;
    for (std::size_t j = 0; j < k; ++j) {
        double r = std::clamp(std::tanh(raw[j]), -kMaxReflection, kMaxReflection);
        prev = cur;
        cur.resize(j + 1);
        cur[j] = r;
        for (std::size_t i = 0; i < j; ++i) cur[i] = prev[i] - r * prev[j - 1 - i];
    }
    return cur;
}

bool coeffs_to_pacf(std::span<const double> coeffs, std::vector<double>& pacf_out) {
    std::vector<double> cur(coeffs.begin(), coeffs.end());
    pacf_out.assign(coeffs.size(), 0.0);
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        double r = cur[j];
        if (!(std::abs(r) < 1.0)) return false;
        pacf_out[j] = r;
        std::vector<double> prev(j);
        double denom = 1.0 - r * r;
        for (std::size_t i = 0; i < j; ++i) prev[i] = (cur[i] + r * cur[j - 1 - i]) / denom;
        cur = std::move(prev);
    }
    return true;
}

std::vector<std::complex<double>> inverse_roots(std::span<const double> coeffs) {
    const auto k = static_cast<Eigen::Index>(coeffs.size());
    if (k == 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) companion(0, j) = coeffs[j];
    for (Eigen::Index i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(k);
    for (Eigen::Index i = 0; i < k; ++i) roots[i] = es.eigenvalues()(i);
    return roots;
}

bool arma_identified(const ArmaSpec& spec, double root_modulus_max,
                     double min_root_separation) {
    auto ar = inverse_roots(spec.phi);
    auto ma = inverse_roots(spec.theta);
    for (const auto& r : ar) {
        if (std::abs(r) > root_modulus_max) return false;
    }
    for (const auto& r : ma) {
        if (std::abs(r) > root_modulus_max) return false;
    }
    for (const auto& a : ar) {
        for (const auto& m : ma) {
            if (std::abs(a - m) < min_root_separation) return false;
        }
    }
    return true;
}

std::vector<double> arma_residuals(const ArmaSpec& spec, std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t p = static_cast<std::size_t>(spec.p);
    const std::size_t q = static_cast<std::size_t>(spec.q);
    std::vector<double> eps(n, 0.0);
    for (std::size_t t = p; t < n; ++t) {
        double pred = spec.intercept;
        for (std::size_t i = 1; i <= p; ++i) pred += spec.phi[i - 1] * y[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) {
            if (t - j >= p) pred -= spec.theta[j - 1] * eps[t - j];
        }
        eps[t] = y[t] - pred;
    }
    return eps;
}

double arma_forecast_one(const ArmaSpec& spec, std::span<const double> y,
                         std::span<const double> residuals) {
    const std::size_t n = y.size();
    double pred = spec.intercept;
    for (int i = 1; i <= spec.p; ++i) {
        if (n < static_cast<std::size_t>(i)) throw std::invalid_argument("history too short");
        pred += spec.phi[i - 1] * y[n - i];
    }
    for (int j = 1; j <= spec.q; ++j) {
        if (residuals.size() < static_cast<std::size_t>(j)) {
            throw std::invalid_argument("residual history too short");
        }
        pred -= spec.theta[j - 1] * residuals[residuals.size() - j];
    }
    return pred;
}

namespace {

ArmaSpec unpack_params(const std::vector<double>& x, int p, int q) {
    ArmaSpec spec;
    spec.p = p;
    spec.q = q;
    spec.intercept = x[0];
    spec.phi = pacf_to_coeffs(std::span<const double>(x.data() + 1, p));
    spec.theta = pacf_to_coeffs(std::span<const double>(x.data() + 1 + p, q));
    return spec;
}

}  // namespace

ArmaFit fit_arma_single(std::span<const double> y, int p, int q, const MinimizeOptions& opts,
                        int css_start) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit_arma_single: negative order");
    const std::size_t n = y.size();
    const std::size_t start = static_cast<std::size_t>(std::max(p, css_start));
    if (n < 50 || n <= start + static_cast<std::size_t>(p + q + 2)) {
        throw std::invalid_argument("fit_arma_single: series too short");
    }
    const std::size_t n_eff = n - start;

    auto ssr_from = [&](const ArmaSpec& spec) {
        std::vector<double> eps = arma_residuals(spec, y);
        double ssr = 0.0;
        for (std::size_t t = start; t < eps.size(); ++t) ssr += eps[t] * eps[t];
        return ssr;
    };

    // Concentrated negative log-likelihood up to constants: n_eff/2 * log(SSR).
    Objective obj = [&](const std::vector<double>& x) {
        double ssr = ssr_from(unpack_params(x, p, q));
        if (!(ssr > 0.0)) return std::numeric_limits<double>::infinity();
        return 0.5 * static_cast<double>(n_eff) * std::log(ssr);
    };

    std::vector<double> x0(1 + p + q, 0.0);
    x0[0] = mean(y);
    MinimizeResult r = minimize_bfgs(obj, std::move(x0), opts);

    ArmaFit fit;
    fit.spec = unpack_params(r.x, p, q);
    fit.residuals = arma_residuals(fit.spec, y);
    fit.sigma2 = ssr_from(fit.spec) / static_cast<double>(n_eff);
    fit.loglik =
        -0.5 * static_cast<double>(n_eff) * (std::log(kTwoPi) + std::log(fit.sigma2) + 1.0);
    const int k = 1 + p + q + 1;
    fit.aic = 2.0 * k - 2.0 * fit.loglik;
    fit.converged = r.converged;
    fit.iterations = r.iterations;
    return fit;
}

ArmaFit fit_arma(std::span<const double> y, int p_max, int q_max, const MinimizeOptions& opts) {
    // Candidates are compared on the common sample implied by p_max so their
    // likelihoods cover identical observations; the winner is then refit on
    // the longest sample its own order allows.
    int best_p = -1, best_q = -1;
    double best_aic = 0.0;
    std::ostringstream failures;
    for (int p = 0; p <= p_max; ++p) {
        for (int q = 0; q <= q_max; ++q) {
            ArmaFit f;
            try {
                f = fit_arma_single(y, p, q, opts, p_max);
            } catch (const std::exception& e) {
                failures << "(" << p << "," << q << "): " << e.what() << "; ";
                continue;
            }
            if (!f.converged) {
                failures << "(" << p << "," << q << "): no convergence; ";
                continue;
            }
            if (!arma_identified(f.spec)) {
                failures << "(" << p << "," << q << "): degenerate roots; ";
                continue;
            }
            if (best_p < 0 || f.aic < best_aic) {
                best_aic = f.aic;
                best_p = p;
                best_q = q;
            }
        }
    }
    if (best_p < 0) {
        throw std::runtime_error("fit_arma: no grid cell converged [" + failures.str() + "]");
    }
    return fit_arma_single(y, best_p, best_q, opts);
}

}  // namespace llab::arga
