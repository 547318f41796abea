#pragma once

#include <functional>

#include <Eigen/Dense>

namespace optomech {

// Damped least squares (Levenberg-Marquardt) with a numerically
// differenced Jacobian. Minimizes 0.5 * |r(theta)|^2.
struct LMOptions {
    int max_iterations = 200;
    // Stop once the scaled gradient norm drops below this, relative to its
    // starting value.
    double gradient_tol = 1e-10;
    // Central differences with per-parameter step relative_step * max(|theta_j|, scale_j).
    double relative_step = 1e-6;
    Eigen::VectorXd step_scale; // empty means all ones
};

struct LMResult {
    Eigen::VectorXd theta;
    double residual_norm = 0.0; // |r| at the solution
    bool converged = false;
    int iterations = 0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Throws DegenerateFitError when the Jacobian is rank deficient at the start
// (fewer residuals than parameters, or a parameter without influence) and
// NumericalError when residuals stop being finite.
LMResult levenberg_marquardt(const ResidualFn& residuals, const Eigen::VectorXd& theta0,
                             const LMOptions& opts = {});

} // namespace optomech
