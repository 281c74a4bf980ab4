#include "llab/arga/garch.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace llab::arga {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kMaxPersistence = 0.999998;  // keeps a + b < 1 - 1e-6 with slack
constexpr double kMaxEgarchA = 0.999999;
constexpr double kLogVarClamp = 60.0;  // recursion guard against optimizer excursions

void check_inputs(std::span<const double> eps, VolMode mode, std::span<const double> beta) {
    if (eps.size() < 2) throw std::invalid_argument("volatility fit: series too short");
    if (mode == VolMode::kLiquidityAdjusted) {
        if (beta.size() != eps.size()) {
            throw std::invalid_argument("liquidity-adjusted mode needs a beta per observation");
        }
        for (double b : beta) {
            if (!(b > 0.0)) throw std::invalid_argument("beta series must be positive");
        }
    }
}

double presample_variance(std::span<const double> eps) {
    double s = 0.0;
    for (double e : eps) s += e * e;
    double v = s / static_cast<double>(eps.size());
    return v > 0.0 ? v : 1e-12;
}

double gaussian_loglik(std::span<const double> eps, std::span<const double> sigma2) {
    double ll = 0.0;
    for (std::size_t t = 1; t < eps.size(); ++t) {
        ll += std::log(sigma2[t]) + eps[t] * eps[t] / sigma2[t];
    }
    double n = static_cast<double>(eps.size() - 1);
    return -0.5 * (n * std::log(kTwoPi) + ll);
}

}  // namespace

std::vector<double> garch_path(const GarchParams& p, std::span<const double> eps,
                               std::span<const double> beta, double sigma2_0,
                               const VolPathOptions& opts, std::size_t* floor_events) {
    std::vector<double> s2(eps.size());
    std::size_t floors = 0;
    s2[0] = std::max(sigma2_0, opts.variance_floor);
    const bool la = opts.mode == VolMode::kLiquidityAdjusted;
    for (std::size_t t = 1; t < eps.size(); ++t) {
        double v = p.omega + p.a * eps[t - 1] * eps[t - 1] + p.b * s2[t - 1];
        if (la) {
            double b2 = beta[t - 1] * beta[t - 1];
            v += p.omega * (1.0 - b2) / b2;
        }
        if (v < opts.variance_floor) {
            v = opts.variance_floor;
            ++floors;
        }
        s2[t] = v;
    }
    if (floor_events) *floor_events = floors;
    return s2;
}

std::vector<double> egarch_path(const EgarchParams& p, std::span<const double> eps,
                                std::span<const double> beta, double sigma2_0,
                                const VolPathOptions& opts, std::size_t* floor_events) {
    std::vector<double> s2(eps.size());
    std::size_t floors = 0;
    const double log_floor = std::log(opts.variance_floor);
    s2[0] = std::max(sigma2_0, opts.variance_floor);
    double log_s2 = std::log(s2[0]);
    const bool la = opts.mode == VolMode::kLiquidityAdjusted;
    for (std::size_t t = 1; t < eps.size(); ++t) {
        double z = eps[t - 1] / std::sqrt(s2[t - 1]);
        double g = p.theta * z + p.lambda * (std::abs(z) - kAbsZMean);
        double v = p.omega + p.b * g + p.a * log_s2;
        if (la) v += (p.a - 1.0) * std::log(beta[t - 1] * beta[t - 1]);
        if (v < log_floor) {
            v = log_floor;
            ++floors;
        } else if (v > kLogVarClamp) {
            v = kLogVarClamp;
        }
        log_s2 = v;
        s2[t] = std::exp(v);
    }
    if (floor_events) *floor_events = floors;
    return s2;
}

double garch_forecast(const GarchParams& p, double last_eps, double last_sigma2, VolMode mode,
                      double last_beta) {
    double v = p.omega + p.a * last_eps * last_eps + p.b * last_sigma2;
    if (mode == VolMode::kLiquidityAdjusted) {
        double b2 = last_beta * last_beta;
        v += p.omega * (1.0 - b2) / b2;
    }
    return std::max(v, 1e-12);
}

double egarch_forecast(const EgarchParams& p, double last_eps, double last_sigma2, VolMode mode,
                       double last_beta) {
    double z = last_eps / std::sqrt(last_sigma2);
    double g = p.theta * z + p.lambda * (std::abs(z) - kAbsZMean);
    double v = p.omega + p.b * g + p.a * std::log(last_sigma2);
    if (mode == VolMode::kLiquidityAdjusted) v += (p.a - 1.0) * std::log(last_beta * last_beta);
    return std::exp(std::min(std::max(v, std::log(1e-12)), kLogVarClamp));
}

namespace {

GarchParams unpack_garch(const std::vector<double>& x) {
    GarchParams p;
    p.omega = std::exp(x[0]);
    double pers = kMaxPersistence * sigmoid(x[1]);
    double frac = sigmoid(x[2]);
    p.a = pers * frac;
    p.b = pers - p.a;
    return p;
}

EgarchParams unpack_egarch(const std::vector<double>& x) {
    EgarchParams p;
    p.omega = x[0];
    p.a = kMaxEgarchA * std::tanh(x[1]);
    p.b = x[2];
    p.theta = x[3];
    p.lambda = x[4];
    return p;
}

}  // namespace

VolFit fit_garch(std::span<const double> eps, VolMode mode, std::span<const double> beta,
                 const MinimizeOptions& opts) {
    check_inputs(eps, mode, beta);
    const double vbar = presample_variance(eps);
    VolPathOptions path_opts{mode, 1e-12};

    Objective obj = [&](const std::vector<double>& x) {
        GarchParams p = unpack_garch(x);
        std::vector<double> s2 = garch_path(p, eps, beta, vbar, path_opts);
        return -gaussian_loglik(eps, s2);
    };

    // omega = 0.1 * presample variance, a = 0.05, b = 0.90
    std::vector<double> x0 = {std::log(0.1 * vbar), logit(0.95 / kMaxPersistence),
                              logit(0.05 / 0.95)};
    MinimizeResult r = minimize_bfgs(obj, std::move(x0), opts);

    VolFit fit;
    fit.kind = VolSpecKind::kGarch;
    fit.mode = mode;
    fit.garch = unpack_garch(r.x);
    fit.sigma2 = garch_path(fit.garch, eps, beta, vbar, path_opts, &fit.floor_events);
    fit.loglik = gaussian_loglik(eps, fit.sigma2);
    fit.k_params = 3;
    fit.aic = 2.0 * fit.k_params - 2.0 * fit.loglik;
    fit.converged = r.converged;
    return fit;
}

VolFit fit_egarch(std::span<const double> eps, VolMode mode, std::span<const double> beta,
                  const MinimizeOptions& opts) {
    check_inputs(eps, mode, beta);
    const double vbar = presample_variance(eps);
    VolPathOptions path_opts{mode, 1e-12};

    Objective obj = [&](const std::vector<double>& x) {
        EgarchParams p = unpack_egarch(x);
        std::vector<double> s2 = egarch_path(p, eps, beta, vbar, path_opts);
        return -gaussian_loglik(eps, s2);
    };

    // omega = 0.1 * log presample variance, a = 0.95, b = 0.1, theta = 0, lambda = 0.2
    std::vector<double> x0 = {0.1 * std::log(vbar), std::atanh(0.95 / kMaxEgarchA), 0.1, 0.0, 0.2};
    MinimizeResult r = minimize_bfgs(obj, std::move(x0), opts);

    VolFit fit;
    fit.kind = VolSpecKind::kEgarch;
    fit.mode = mode;
    fit.egarch = unpack_egarch(r.x);
    fit.sigma2 = egarch_path(fit.egarch, eps, beta, vbar, path_opts, &fit.floor_events);
    fit.loglik = gaussian_loglik(eps, fit.sigma2);
    fit.k_params = 5;
    fit.aic = 2.0 * fit.k_params - 2.0 * fit.loglik;
    fit.converged = r.converged;
    return fit;
}

VolFit fit_volatility(std::span<const double> eps, VolMode mode, std::span<const double> beta,
                      const MinimizeOptions& opts) {
    VolFit g, e;
    bool g_ok = false, e_ok = false;
    try {
        g = fit_garch(eps, mode, beta, opts);
        g_ok = g.converged;
    } catch (const std::exception&) {
    }
    try {
        e = fit_egarch(eps, mode, beta, opts);
        e_ok = e.converged;
    } catch (const std::exception&) {
    }
    if (g_ok && e_ok) return g.aic <= e.aic ? g : e;
    if (g_ok) return g;
    if (e_ok) return e;
    throw std::runtime_error("fit_volatility: neither GARCH nor EGARCH converged");
}

}  // namespace llab::arga
