#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace atomslit {

// Weighted nonlinear least squares, chi2 = sum_i ((y_i - f(x_i; theta))/sigma_i)^2.
struct LsqResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // (J^T W J)^-1 at the optimum
    double chi2 = 0.0;
    int ndof = 0;
    int iterations = 0;
    bool converged = false;
};

// Model callback: fills `f` with model values at the current parameters.
using LsqModel = std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& f)>;

// Levenberg-Marquardt with a forward-difference Jacobian. Sigmas equal to
// zero are treated as unit weights and the covariance is then rescaled by
// chi2/ndof. Throws FitError when the iteration fails to converge.
LsqResult levenberg_marquardt(const LsqModel& model,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& sigma,
                              const Eigen::VectorXd& initial,
                              int max_iterations = 200,
                              double tol = 1e-12);

// chi2 at fixed parameters, with the same weighting convention.
double lsq_chi2(const LsqModel& model, const Eigen::VectorXd& y,
                const Eigen::VectorXd& sigma, const Eigen::VectorXd& params);

}  // namespace atomslit
