#include "optomech/optim.hpp"

#include <cmath>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& theta,
                                 const Eigen::VectorXd& r0, const LMOptions& opts) {
    const int n = static_cast<int>(theta.size());
    const int m = static_cast<int>(r0.size());
    Eigen::MatrixXd J(m, n);
    for (int j = 0; j < n; ++j) {
        const double scale = opts.step_scale.size() == n ? opts.step_scale[j] : 1.0;
        const double h = opts.relative_step * std::max(std::abs(theta[j]), scale);
        Eigen::VectorXd tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        J.col(j) = (f(tp) - f(tm)) / (2.0 * h);
    }
    if (!J.allFinite())
        throw NumericalError("levenberg_marquardt: non-finite Jacobian");
    return J;
}

} // namespace

LMResult levenberg_marquardt(const ResidualFn& residuals, const Eigen::VectorXd& theta0,
                             const LMOptions& opts) {
    const int n = static_cast<int>(theta0.size());
    Eigen::VectorXd theta = theta0;
    Eigen::VectorXd r = residuals(theta);
    if (!r.allFinite())
        throw NumericalError("levenberg_marquardt: non-finite residuals at start");
    if (r.size() < n)
        throw DegenerateFitError("levenberg_marquardt: fewer residuals than parameters");

    double cost = 0.5 * r.squaredNorm();
    double lambda = 1e-3;
    double g0_norm = -1.0;
    LMResult result;
    result.theta = theta;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        result.iterations = iter + 1;
        const Eigen::MatrixXd J = numeric_jacobian(residuals, theta, r, opts);
        if (iter == 0) {
            // Rank check on the column-equilibrated Jacobian; raw singular
            // values only mirror the mixed parameter scales (log rates vs
            // per-rad/s detunings span many decades).
            Eigen::MatrixXd jn = J;
            bool zero_column = false;
            for (int j = 0; j < n; ++j) {
                const double nrm = jn.col(j).norm();
                if (nrm == 0.0) {
                    zero_column = true;
                    break;
                }
                jn.col(j) /= nrm;
            }
            bool collinear = false;
            if (!zero_column) {
                const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jn);
                const auto& sv = svd.singularValues();
                collinear = sv.size() == 0 || sv(sv.size() - 1) <= 1e-10 * sv(0);
            }
            if (zero_column || collinear)
                throw DegenerateFitError("levenberg_marquardt: singular Jacobian, "
                                         "parameterization is degenerate");
        }
        const Eigen::MatrixXd jtj = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        const double g_norm = g.lpNorm<Eigen::Infinity>();
        if (g0_norm < 0.0)
            g0_norm = std::max(g_norm, 1e-300);
        if (g_norm <= opts.gradient_tol * g0_norm) {
            result.converged = true;
            break;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 32 && !stepped; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (int j = 0; j < n; ++j)
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-300);
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            const Eigen::VectorXd trial = theta + step;
            const Eigen::VectorXd rt = residuals(trial);
            if (rt.allFinite()) {
                const double trial_cost = 0.5 * rt.squaredNorm();
                if (trial_cost < cost) {
                    theta = trial;
                    r = rt;
                    cost = trial_cost;
                    lambda = std::max(lambda / 3.0, 1e-14);
                    stepped = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if (!stepped) {
            // No descent direction left at any damping; accept as stationary.
            result.converged = g_norm <= 1e-6 * g0_norm;
            break;
        }
    }
    result.theta = theta;
    result.residual_norm = std::sqrt(2.0 * cost);
    return result;
}

} // namespace optomech
