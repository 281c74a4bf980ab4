// model.hpp - two-stage ARMA-GARCH/EGARCH estimation and forecasting.
//
// Stage one fits the conditional mean by CSS over the (p,q) grid; stage two
// fits GARCH(1,1) and EGARCH(1,1) on the mean residuals by QMLE and keeps
// the lower-AIC specification. The reported log-likelihood is the stage-two
// Gaussian quasi-likelihood of the residuals under the fitted variance path,
// which is the quasi-likelihood of the composite model at the two-stage
// estimates.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "llab/arga/arma.hpp"
#include "llab/arga/garch.hpp"

namespace llab::arga {

struct FitOptions {
    int p_max = 4;
    int q_max = 4;
    VolMode mode = VolMode::kStandard;
    MinimizeOptions optimizer;
};

struct ModelFit {
    ArmaFit arma;
    VolFit vol;
    bool la_mode = false;
    std::vector<double> beta;  // copy of the beta series in adjusted mode
    double loglik = 0;
    int k_params = 0;  // mean parameters (incl. intercept) + variance parameters
    double aic = 0;
};

// `beta` is required (positive, same length as y) in liquidity-adjusted mode.
ModelFit fit_model(std::span<const double> y, const FitOptions& opts,
                   std::span<const double> beta = {});

struct Forecast {
    double mu_hat = 0;
    double sigma2_hat = 0;
};

// One-step forecast from an arbitrary history using the fitted parameters:
// residual and variance paths are rebuilt over `y` (and `beta` in adjusted
// mode), then rolled one step forward.
Forecast forecast_one_step(const ModelFit& fit, std::span<const double> y,
                           std::span<const double> beta = {});

// Root mean squared error; throws on length mismatch or empty input.
double rmse(std::span<const double> forecasts, std::span<const double> realized);

struct ScalingCheck {
    double max_eps_rel_dev = 0;    // fitted adjusted residuals vs eps / beta
    double max_sigma_rel_dev = 0;  // fitted adjusted sigma vs sigma / beta
};

// Compares a standard fit on y and an adjusted fit on y / beta. Deviations
// are measured relative to max(|reference|, 1e-3 * RMS(reference)) so
// near-zero residuals do not blow up the ratio. With a constant beta the
// adjusted model is an exact rescaling and both deviations are ~0.
ScalingCheck scaling_identity_check(const ModelFit& fit_std, const ModelFit& fit_la,
                                    std::span<const double> beta);

// Report-facing labels.
std::string vol_spec_name(VolSpecKind kind);  // "garch" | "egarch"

}  // namespace llab::arga
