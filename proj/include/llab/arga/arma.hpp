// arma.hpp - ARMA(p,q) conditional-mean models.
//
// Estimation is conditional-sum-of-squares with presample residuals at zero,
// the Gaussian working likelihood evaluated on the CSS innovation variance.
// Coefficients are optimized through a partial-autocorrelation transform so
// every candidate stays stationary (AR) and invertible (MA). The sign
// convention subtracts the MA terms:
//   y_t = delta + sum_i phi_i y_{t-i} - sum_j theta_j eps_{t-j} + eps_t
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "llab/arga/optim.hpp"

namespace llab::arga {

struct ArmaSpec {
    int p = 0;
    int q = 0;
    double intercept = 0;
    std::vector<double> phi;
    std::vector<double> theta;
};

struct ArmaFit {
    ArmaSpec spec;
    std::vector<double> residuals;  // length n; entries before index p are zero
    double sigma2 = 0;              // CSS innovation variance
    double loglik = 0;
    double aic = 0;  // 2k - 2 loglik with k = 1 + p + q + 1 (intercept + coeffs + variance)
    bool converged = false;
    int iterations = 0;
};

// Maps unconstrained values through tanh to reflection coefficients and then
// through the Levinson recursion to polynomial coefficients; the resulting
// 1 - sum c_i L^i always has roots outside the unit circle.
std::vector<double> pacf_to_coeffs(std::span<const double> raw);

// Inverse recursion; returns false when the coefficients are not strictly
// stationary/invertible (some reflection coefficient has magnitude >= 1).
bool coeffs_to_pacf(std::span<const double> coeffs, std::vector<double>& pacf_out);

// Inverse roots of 1 - sum c_i L^i (companion-matrix eigenvalues); the
// polynomial is stationary/invertible iff all moduli are below one.
std::vector<std::complex<double>> inverse_roots(std::span<const double> coeffs);

// Rejects estimation artifacts: an AR or MA inverse root hugging the unit
// circle, or an AR/MA root pair close enough to cancel (the classic
// common-factor ridge that soaks up likelihood on pure noise).
bool arma_identified(const ArmaSpec& spec, double root_modulus_max = 0.99,
                     double min_root_separation = 0.05);

// Residual recursion over the whole series (presample residuals zero).
std::vector<double> arma_residuals(const ArmaSpec& spec, std::span<const double> y);

// One-step-ahead conditional mean given the history and its residuals.
double arma_forecast_one(const ArmaSpec& spec, std::span<const double> y,
                         std::span<const double> residuals);

// `css_start` conditions the sum of squares on observations before that
// index (at least p); the grid search uses it to score all candidates on a
// common sample.
ArmaFit fit_arma_single(std::span<const double> y, int p, int q,
                        const MinimizeOptions& opts = {}, int css_start = -1);

// Grid search over p in [0, p_max], q in [0, q_max]: candidates are ranked
// by AIC on the common sample implied by p_max, and the winner is refit on
// its natural sample. Throws std::runtime_error when nothing converges.
ArmaFit fit_arma(std::span<const double> y, int p_max = 4, int q_max = 4,
                 const MinimizeOptions& opts = {});

}  // namespace llab::arga
