#include "atomslit/lsq.hpp"

#include <cmath>

#include "atomslit/errors.hpp"

namespace atomslit {

namespace {

Eigen::VectorXd effective_weights(const Eigen::VectorXd& sigma) {
    // 1/sigma per point; sigma <= 0 means "unweighted".
    Eigen::VectorXd w(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        w[i] = sigma[i] > 0.0 ? 1.0 / sigma[i] : 1.0;
    }
    return w;
}

bool all_unweighted(const Eigen::VectorXd& sigma) {
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma[i] > 0.0) return false;
    }
    return true;
}

}  // namespace

double lsq_chi2(const LsqModel& model, const Eigen::VectorXd& y,
                const Eigen::VectorXd& sigma, const Eigen::VectorXd& params) {
    Eigen::VectorXd f(y.size());
    model(params, f);
    const Eigen::VectorXd w = effective_weights(sigma);
    double chi2 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double r = (y[i] - f[i]) * w[i];
        chi2 += r * r;
    }
    return chi2;
}

LsqResult levenberg_marquardt(const LsqModel& model, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& sigma,
                              const Eigen::VectorXd& initial,
                              int max_iterations, double tol) {
    const Eigen::Index m = y.size();
    const Eigen::Index np = initial.size();
    if (m < np) throw FitError("levenberg_marquardt: fewer points than parameters");

    const Eigen::VectorXd w = effective_weights(sigma);

    Eigen::VectorXd params = initial;
    Eigen::VectorXd f(m), f_trial(m);
    Eigen::MatrixXd jac(m, np);

    auto weighted_residual = [&](const Eigen::VectorXd& fv, Eigen::VectorXd& r) {
        r.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) r[i] = (y[i] - fv[i]) * w[i];
    };

    model(params, f);
    Eigen::VectorXd resid;
    weighted_residual(f, resid);
    double chi2 = resid.squaredNorm();

    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    for (; iter < max_iterations && !converged; ++iter) {
        // Forward-difference Jacobian of the weighted residual.
        for (Eigen::Index j = 0; j < np; ++j) {
            const double h = 1e-7 * std::max(std::abs(params[j]), 1e-7);
            Eigen::VectorXd pj = params;
            pj[j] += h;
            model(pj, f_trial);
            for (Eigen::Index i = 0; i < m; ++i) {
                jac(i, j) = -(f_trial[i] - f[i]) * w[i] / h;
            }
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * resid;

        bool stepped = false;
        for (int attempt = 0; attempt < 32; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index j = 0; j < np; ++j) {
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
            }
            const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
            const Eigen::VectorXd trial = params + step;
            model(trial, f_trial);
            Eigen::VectorXd resid_trial;
            weighted_residual(f_trial, resid_trial);
            const double chi2_trial = resid_trial.squaredNorm();
            if (chi2_trial <= chi2) {
                const double drop = chi2 - chi2_trial;
                params = trial;
                f = f_trial;
                resid = resid_trial;
                chi2 = chi2_trial;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (drop <= tol * (1.0 + chi2) && step.cwiseAbs().maxCoeff() <=
                        1e-9 * (1.0 + params.cwiseAbs().maxCoeff())) {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // No downhill step found; treat the current point as the optimum
            // if the gradient is already negligible.
            if (jtr.cwiseAbs().maxCoeff() < 1e-10 * (1.0 + chi2)) {
                converged = true;
            } else {
                break;
            }
        }
    }
    if (!converged) {
        throw FitError("levenberg_marquardt: no convergence after " +
                       std::to_string(iter) + " iterations (chi2 = " +
                       std::to_string(chi2) + ")");
    }

    // Covariance from the final Jacobian.
    for (Eigen::Index j = 0; j < np; ++j) {
        const double h = 1e-7 * std::max(std::abs(params[j]), 1e-7);
        Eigen::VectorXd pj = params;
        pj[j] += h;
        model(pj, f_trial);
        for (Eigen::Index i = 0; i < m; ++i) {
            jac(i, j) = -(f_trial[i] - f[i]) * w[i] / h;
        }
    }
    LsqResult res;
    res.params = params;
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    res.covariance = jtj.ldlt().solve(Eigen::MatrixXd::Identity(np, np));
    res.chi2 = chi2;
    res.ndof = static_cast<int>(m - np);
    res.iterations = iter;
    res.converged = true;
    if (all_unweighted(sigma) && res.ndof > 0) {
        res.covariance *= chi2 / static_cast<double>(res.ndof);
    }
    return res;
}

}  // namespace atomslit
