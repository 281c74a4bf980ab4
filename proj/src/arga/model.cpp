#include "llab/arga/model.hpp"

#include <cmath>
#include <stdexcept>

namespace llab::arga {

ModelFit fit_model(std::span<const double> y, const FitOptions& opts,
                   std::span<const double> beta) {
    ModelFit fit;
    fit.la_mode = opts.mode == VolMode::kLiquidityAdjusted;
    if (fit.la_mode) {
        if (beta.size() != y.size()) {
            throw std::invalid_argument("fit_model: adjusted mode needs a beta per observation");
        }
        fit.beta.assign(beta.begin(), beta.end());
    }
    fit.arma = fit_arma(y, opts.p_max, opts.q_max, opts.optimizer);
    fit.vol = fit_volatility(fit.arma.residuals, opts.mode, beta, opts.optimizer);
    fit.loglik = fit.vol.loglik;
    fit.k_params = 1 + fit.arma.spec.p + fit.arma.spec.q + fit.vol.k_params;
    fit.aic = 2.0 * fit.k_params - 2.0 * fit.loglik;
    return fit;
}

Forecast forecast_one_step(const ModelFit& fit, std::span<const double> y,
                           std::span<const double> beta) {
    if (fit.la_mode && beta.size() != y.size()) {
        throw std::invalid_argument("forecast_one_step: adjusted mode needs beta history");
    }
    std::vector<double> eps = arma_residuals(fit.arma.spec, y);

    Forecast out;
    out.mu_hat = arma_forecast_one(fit.arma.spec, y, eps);

    double vbar = 0.0;
    for (double e : eps) vbar += e * e;
    vbar = std::max(vbar / static_cast<double>(eps.size()), 1e-12);

    VolPathOptions path_opts{fit.la_mode ? VolMode::kLiquidityAdjusted : VolMode::kStandard,
                             1e-12};
    const double last_beta = fit.la_mode ? beta.back() : 1.0;
    if (fit.vol.kind == VolSpecKind::kGarch) {
        std::vector<double> s2 = garch_path(fit.vol.garch, eps, beta, vbar, path_opts);
        out.sigma2_hat =
            garch_forecast(fit.vol.garch, eps.back(), s2.back(), path_opts.mode, last_beta);
    } else {
        std::vector<double> s2 = egarch_path(fit.vol.egarch, eps, beta, vbar, path_opts);
        out.sigma2_hat =
            egarch_forecast(fit.vol.egarch, eps.back(), s2.back(), path_opts.mode, last_beta);
    }
    return out;
}

double rmse(std::span<const double> forecasts, std::span<const double> realized) {
    if (forecasts.size() != realized.size()) throw std::invalid_argument("rmse: length mismatch");
    if (forecasts.empty()) throw std::invalid_argument("rmse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        double d = forecasts[i] - realized[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(forecasts.size()));
}

namespace {

double max_rel_dev(std::span<const double> actual, std::span<const double> reference) {
    double rms = 0.0;
    for (double r : reference) rms += r * r;
    rms = std::sqrt(rms / static_cast<double>(reference.size()));
    double floor = std::max(1e-3 * rms, 1e-300);
    double worst = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        double denom = std::max(std::abs(reference[i]), floor);
        worst = std::max(worst, std::abs(actual[i] - reference[i]) / denom);
    }
    return worst;
}

}  // namespace

ScalingCheck scaling_identity_check(const ModelFit& fit_std, const ModelFit& fit_la,
                                    std::span<const double> beta) {
    const auto& eps_std = fit_std.arma.residuals;
    const auto& eps_la = fit_la.arma.residuals;
    if (eps_std.size() != eps_la.size() || beta.size() != eps_std.size()) {
        throw std::invalid_argument("scaling_identity_check: length mismatch");
    }
    std::vector<double> eps_ref(eps_std.size()), sig_ref(eps_std.size()),
        sig_la(eps_std.size());
    for (std::size_t t = 0; t < eps_std.size(); ++t) {
        eps_ref[t] = eps_std[t] / beta[t];
        sig_ref[t] = std::sqrt(fit_std.vol.sigma2[t]) / beta[t];
        sig_la[t] = std::sqrt(fit_la.vol.sigma2[t]);
    }
    ScalingCheck out;
    out.max_eps_rel_dev = max_rel_dev(eps_la, eps_ref);
    out.max_sigma_rel_dev = max_rel_dev(sig_la, sig_ref);
    return out;
}

std::string vol_spec_name(VolSpecKind kind) {
    return kind == VolSpecKind::kGarch ? "garch" : "egarch";
}

}  // namespace llab::arga
