#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <vector>

namespace tsf::optim {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    /// Stop when f_worst - f_best <= rel_tol * (|f_best| + rel_tol).
    double rel_tol = 1e-8;
    int max_iterations = 2000;
    /// Initial simplex edge along each axis (absolute).
    double initial_step = 0.1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    /// Best objective value after each iteration.
    std::vector<double> trace;
};

/// Unconstrained Nelder-Mead simplex minimisation. Infeasible points are
/// expressed by the objective returning +inf (or NaN, treated as +inf).
[[nodiscard]] NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                                           const NelderMeadOptions& options = {});

/// Central-difference Hessian with per-coordinate step rel_step * max(1, |x_i|).
[[nodiscard]] Eigen::MatrixXd numeric_hessian(const Objective& f, const std::vector<double>& x,
                                              double rel_step = 1e-4);

} // namespace tsf::optim
