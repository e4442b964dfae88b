#pragma once

#include <Eigen/Dense>
#include <vector>

namespace isindy {

// Lasso objective used throughout: ||y - Psi^T b||_2^2 + beta * ||b||_1,
// with no 1/T or 1/2 normalization. Psi is K x T (one feature per row).
struct LassoOptions {
    double beta = 0.0;
    int max_sweeps = 10'000;
    double tol = 1e-10;        // max |coefficient change| per sweep
    bool standardize = true;   // scale feature rows to unit RMS internally
};

struct LassoSolution {
    Eigen::VectorXd coefficients;        // in original (unscaled) feature units
    int sweeps_used = 0;
    bool converged = false;
    double objective_value = 0.0;        // objective at `coefficients`
    std::vector<double> objective_trace; // internal objective after each sweep
};

// Cyclic coordinate descent in canonical feature order, with active-set
// refinement between full sweeps. A non-converged run returns its best
// iterate with converged=false; it is not an error. An optional warm start
// is given in unscaled units.
LassoSolution lasso(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                    const LassoOptions& opts,
                    const Eigen::VectorXd* warm_start = nullptr);

// Minimum-norm least squares via a rank-revealing decomposition.
Eigen::VectorXd least_squares_pinv(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y);

// Maximum KKT residual of the lasso objective at b (beta > 0 required):
// for active coordinates |g_k - beta*sign(b_k)|, for inactive ones
// max(0, |g_k| - beta), where g_k = 2 <psi_k, y - Psi^T b>.
double kkt_violation(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& b, double beta);

double lasso_objective(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& b, double beta);

} // namespace isindy
