#include "llab/arga/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace llab::arga {

namespace {

double safe_eval(const Objective& f, const std::vector<double>& x) {
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x,
                                     double rel_step) {
    const std::size_t n = x.size();
    std::vector<double> g(n, 0.0);
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < n; ++i) {
        double h = rel_step * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        double fp = safe_eval(f, xp);
        xp[i] = x[i] - h;
        double fm = safe_eval(f, xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0,
                             const MinimizeOptions& opts) {
    const std::size_t n = x0.size();
    MinimizeResult res;
    res.x = std::move(x0);
    res.f = safe_eval(f, res.x);
    if (n == 0) {
        res.converged = true;
        return res;
    }

    // Inverse Hessian approximation, row-major. `fresh` marks an unscaled
    // identity: the next direction is normalized to a unit step and the
    // first curvature pair rescales H before the regular update.
    std::vector<double> H(n * n, 0.0);
    bool fresh = true;
    auto reset_H = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
        fresh = true;
    };
    reset_H();

    std::vector<double> g = numeric_gradient(f, res.x, opts.fd_step);
    std::vector<double> d(n), x_new(n), g_new(n), s(n), y(n), Hy(n);

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        res.iterations = iter + 1;

        // d = -H g
        double dg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += H[i * n + j] * g[j];
            d[i] = -v;
        }
        for (std::size_t i = 0; i < n; ++i) dg += d[i] * g[i];
        if (!(dg < 0.0)) {  // not a descent direction; restart from steepest descent
            reset_H();
            dg = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = -g[i];
                dg += d[i] * g[i];
            }
            if (!(dg < 0.0)) {
                res.converged = true;  // zero gradient
                return res;
            }
        }
        if (fresh) {
            double dmax = 0.0;
            for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(d[i]));
            if (dmax > 1.0) {
                for (std::size_t i = 0; i < n; ++i) d[i] /= dmax;
                dg /= dmax;
            }
        }

        // Armijo backtracking.
        const double c1 = 1e-4;
        double alpha = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + alpha * d[i];
            f_new = safe_eval(f, x_new);
            if (f_new <= res.f + c1 * alpha * dg) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // No progress possible along this direction at machine scale.
            res.converged = true;
            return res;
        }

        double step_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - res.x[i];
            step_norm = std::max(step_norm, std::abs(s[i]));
        }
        g_new = numeric_gradient(f, x_new, opts.fd_step);
        for (std::size_t i = 0; i < n; ++i) y[i] = g_new[i] - g[i];

        res.x = x_new;
        res.f = f_new;
        g = g_new;

        if (step_norm < opts.param_tol) {
            res.converged = true;
            return res;
        }

        // BFGS inverse update (Sherman-Morrison form).
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) sy += s[i] * y[i];
        if (sy > 1e-12) {
            if (fresh) {
                // Scale the identity to the observed curvature before the
                // first update (Nocedal & Wright eq. 6.20).
                double yy = 0.0;
                for (std::size_t i = 0; i < n; ++i) yy += y[i] * y[i];
                if (yy > 0.0 && std::isfinite(yy)) {
                    double scale = sy / yy;
                    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = scale;
                }
                fresh = false;
            }
            double yHy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                for (std::size_t j = 0; j < n; ++j) v += H[i * n + j] * y[j];
                Hy[i] = v;
                yHy += y[i] * v;
            }
            double c2 = (sy + yHy) / (sy * sy);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    H[i * n + j] += c2 * s[i] * s[j] - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
                }
            }
        }
    }
    return res;  // hit max_iters; converged stays false
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace llab::arga
