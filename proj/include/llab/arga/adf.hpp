// adf.hpp - augmented Dickey-Fuller unit-root test.
//
// The regression includes a constant and a linear trend. The augmentation
// lag is picked by AIC over 0..max_lag on a common sample, then the final
// regression is refit on the longest sample the chosen lag allows. P-values
// interpolate a response surface anchored at three configurable critical
// values (defaults below); the test statistic is mapped piecewise-linearly
// to a normal quantile and through the normal CDF.
#pragma once

#include <span>

namespace llab::arga {

struct AdfCriticalValues {
    double pct1 = -4.379;
    double pct5 = -3.836;
    double pct10 = -3.556;
};

struct AdfResult {
    double statistic = 0;
    double p_value = 1;
    int used_lag = 0;
    int nobs = 0;       // observations in the final regression
    double best_ic = 0; // AIC of the selected lag
    AdfCriticalValues critical;
};

// Throws std::invalid_argument when the series is too short (needs length
// > max_lag + 10) or degenerate (constant).
AdfResult adf_test(std::span<const double> y, int max_lag,
                   const AdfCriticalValues& critical = {});

// Standard normal CDF, shared with the p-value surface.
double normal_cdf(double z);

}  // namespace llab::arga
