// garch.hpp - GARCH(1,1) and EGARCH(1,1) conditional-variance models.
//
// Both come in a standard form and a liquidity-adjusted form that adds a
// term driven by the previous day's liquidity premium beta:
//   GARCH:  s2_t = omega + a e2_{t-1} + b s2_{t-1} + omega (1 - B2_{t-1}) / B2_{t-1}
//   EGARCH: log s2_t = omega + b g(Z_{t-1}) + a log s2_{t-1} + (a - 1) log B2_{t-1}
// with g(Z) = theta Z + lambda (|Z| - E|Z|). At beta == 1 the extra terms
// vanish and the adjusted recursions collapse to the standard ones.
//
// Estimation is Gaussian QMLE through an unconstrained reparametrization:
// log omega, a persistence/fraction logistic pair keeping a >= 0, b >= 0,
// a + b < 1 for GARCH, and a tanh-bounded |a| < 1 for EGARCH.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "llab/arga/optim.hpp"

namespace llab::arga {

constexpr double kAbsZMean = 0.7978845608028654;  // E|Z| for Z ~ N(0,1) = sqrt(2/pi)

enum class VolMode { kStandard, kLiquidityAdjusted };
enum class VolSpecKind { kGarch, kEgarch };

struct GarchParams {
    double omega = 0;  // > 0
    double a = 0;      // >= 0
    double b = 0;      // >= 0, a + b < 1
};

struct EgarchParams {
    double omega = 0;
    double a = 0;  // |a| < 1
    double b = 0;
    double theta = 0;   // sign asymmetry in g(Z)
    double lambda = 0;  // magnitude term in g(Z)
};

struct VolPathOptions {
    VolMode mode = VolMode::kStandard;
    double variance_floor = 1e-12;
};

struct VolFit {
    VolSpecKind kind = VolSpecKind::kGarch;
    VolMode mode = VolMode::kStandard;
    GarchParams garch;
    EgarchParams egarch;
    std::vector<double> sigma2;  // conditional variance path, sigma2[0] = presample variance
    double loglik = 0;           // Gaussian, summed over t >= 1
    double aic = 0;
    int k_params = 0;
    bool converged = false;
    std::size_t floor_events = 0;
};

// Conditional variance paths. sigma2_0 seeds the recursion (presample
// variance); `beta` is required in liquidity-adjusted mode and must be
// positive, aligned with eps. Values below the floor are clamped and
// counted.
std::vector<double> garch_path(const GarchParams& p, std::span<const double> eps,
                               std::span<const double> beta, double sigma2_0,
                               const VolPathOptions& opts, std::size_t* floor_events = nullptr);
std::vector<double> egarch_path(const EgarchParams& p, std::span<const double> eps,
                                std::span<const double> beta, double sigma2_0,
                                const VolPathOptions& opts, std::size_t* floor_events = nullptr);

// One-step variance forecast from the last observed state.
double garch_forecast(const GarchParams& p, double last_eps, double last_sigma2, VolMode mode,
                      double last_beta);
double egarch_forecast(const EgarchParams& p, double last_eps, double last_sigma2, VolMode mode,
                       double last_beta);

VolFit fit_garch(std::span<const double> eps, VolMode mode, std::span<const double> beta,
                 const MinimizeOptions& opts = {});
VolFit fit_egarch(std::span<const double> eps, VolMode mode, std::span<const double> beta,
                  const MinimizeOptions& opts = {});

// Fits both specifications and returns the one with the lower AIC among the
// converged candidates. Throws std::runtime_error when neither converges.
VolFit fit_volatility(std::span<const double> eps, VolMode mode,
                      std::span<const double> beta = {}, const MinimizeOptions& opts = {});

}  // namespace llab::arga
