// optim.hpp - unconstrained quasi-Newton minimizer.
//
// Constrained estimation problems are mapped onto unconstrained coordinates
// (log for positive parameters, logistic/tanh for bounded ones) and handed
// to BFGS with central-difference gradients and Armijo backtracking.
#pragma once

#include <functional>
#include <vector>

namespace llab::arga {

struct MinimizeOptions {
    int max_iters = 500;
    double param_tol = 1e-8;  // stop when the step's max-norm falls below this
    double fd_step = 1e-6;    // relative finite-difference step
};

struct MinimizeResult {
    std::vector<double> x;
    double f = 0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Central-difference gradient of f at x.
std::vector<double> numeric_gradient(const Objective& f, const std::vector<double>& x,
                                     double rel_step = 1e-6);

MinimizeResult minimize_bfgs(const Objective& f, std::vector<double> x0,
                             const MinimizeOptions& opts = {});

// Squashing helpers shared by the estimation code.
double sigmoid(double x);
double logit(double p);

}  // namespace llab::arga
