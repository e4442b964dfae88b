#include "isindy/solver.hpp"
#include "isindy/errors.hpp"

#include <cassert>
#include <cmath>

namespace isindy {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

} // namespace

double lasso_objective(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& b, double beta) {
    const Eigen::VectorXd r = y - psi.transpose() * b;
    return r.squaredNorm() + beta * b.lpNorm<1>();
}

LassoSolution lasso(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                    const LassoOptions& opts,
                    const Eigen::VectorXd* warm_start) {
    if (psi.cols() != y.size())
        throw data_error("lasso: feature matrix has " + std::to_string(psi.cols()) +
                         " samples but target has " + std::to_string(y.size()));
    if (opts.beta < 0.0) throw usage_error("lasso: beta must be >= 0");
    if (warm_start && warm_start->size() != psi.rows())
        throw usage_error("lasso: warm start length does not match feature count");

    const long K = psi.rows();
    const long T = psi.cols();

    // Row scales: unit-RMS standardization, identity for all-zero rows.
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(K);
    if (opts.standardize) {
        for (long k = 0; k < K; ++k) {
            const double rms = std::sqrt(psi.row(k).squaredNorm() / static_cast<double>(T));
            if (rms > 0.0) scale(k) = rms;
        }
    }
    Eigen::MatrixXd xs = scale.cwiseInverse().asDiagonal() * psi;
    Eigen::VectorXd norms2(K);
    for (long k = 0; k < K; ++k) norms2(k) = xs.row(k).squaredNorm();

    // Work in scaled coordinates: b_scaled(k) = b(k) * scale(k).
    Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
    if (warm_start) b = warm_start->cwiseProduct(scale);
    Eigen::VectorXd r = y;
    if (warm_start && (b.array() != 0.0).any()) r -= xs.transpose() * b;

    const double half_beta = opts.beta / 2.0;

    auto update = [&](long k) -> double {
        if (norms2(k) == 0.0) return 0.0;
        const double old = b(k);
        const double z = xs.row(k).dot(r) + norms2(k) * old;
        const double next = soft_threshold(z, half_beta) / norms2(k);
        if (next != old) {
            r.noalias() += xs.row(k).transpose() * (old - next);
            b(k) = next;
        }
        return std::abs(next - old);
    };

    LassoSolution sol;
    sol.objective_trace.reserve(16);
#ifndef NDEBUG
    double prev_obj = r.squaredNorm() + opts.beta * b.lpNorm<1>();
#endif
    int sweeps = 0;
    bool converged = false;
    while (sweeps < opts.max_sweeps) {
        // One full cyclic sweep.
        double max_delta = 0.0;
        for (long k = 0; k < K; ++k) max_delta = std::max(max_delta, update(k));
        ++sweeps;
        const double obj = r.squaredNorm() + opts.beta * b.lpNorm<1>();
        sol.objective_trace.push_back(obj);
#ifndef NDEBUG
        assert(obj <= prev_obj * (1.0 + 1e-12) + 1e-300);
        prev_obj = obj;
#endif
        if (max_delta <= opts.tol) {
            converged = true;
            break;
        }
        // Active-set refinement: cycle over the current support until it
        // settles, then fall through to the next full sweep to re-scan.
        std::vector<long> active;
        active.reserve(static_cast<std::size_t>(K));
        for (long k = 0; k < K; ++k)
            if (b(k) != 0.0) active.push_back(k);
        while (!active.empty() && sweeps < opts.max_sweeps) {
            double d = 0.0;
            for (long k : active) d = std::max(d, update(k));
            ++sweeps;
            sol.objective_trace.push_back(r.squaredNorm() + opts.beta * b.lpNorm<1>());
#ifndef NDEBUG
            assert(sol.objective_trace.back() <= prev_obj * (1.0 + 1e-12) + 1e-300);
            prev_obj = sol.objective_trace.back();
#endif
            if (d <= opts.tol) break;
        }
    }

    sol.coefficients = b.cwiseQuotient(scale);
    sol.sweeps_used = sweeps;
    sol.converged = converged;
    sol.objective_value = lasso_objective(psi, y, sol.coefficients, opts.beta);
    return sol;
}

Eigen::VectorXd least_squares_pinv(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y) {
    if (psi.cols() != y.size())
        throw data_error("least_squares_pinv: feature matrix has " + std::to_string(psi.cols()) +
                         " samples but target has " + std::to_string(y.size()));
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(psi.transpose());
    return cod.solve(y);
}

double kkt_violation(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& b, double beta) {
    if (beta <= 0.0) throw usage_error("kkt_violation: beta must be > 0");
    const Eigen::VectorXd r = y - psi.transpose() * b;
    const Eigen::VectorXd g = 2.0 * (psi * r);
    double worst = 0.0;
    for (long k = 0; k < b.size(); ++k) {
        double v;
        if (b(k) != 0.0)
            v = std::abs(g(k) - beta * (b(k) > 0.0 ? 1.0 : -1.0));
        else
            v = std::max(0.0, std::abs(g(k)) - beta);
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace isindy
