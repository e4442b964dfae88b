#pragma once

#include "isindy/timeseries.hpp"

#include <Eigen/Dense>
#include <cstdint>

namespace isindy {

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double alpha = 8.0 / 3.0;
    double dt = 0.01;
    Eigen::Vector3d x0{-8.0, 7.0, 27.0};
};

// Additive Gaussian noise calibrated to a signal-to-noise ratio in dB;
// +infinity means "no noise".
struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
};

Eigen::Vector3d lorenz_rhs(const LorenzParams& p, const Eigen::Vector3d& x);

// Classical fixed-step RK4; returns steps+1 rows including the initial state.
// Aborts with a diagnostic if the state leaves the finite range.
TimeSeries simulate_lorenz(const LorenzParams& p, long steps);

// x(t+1) = r * x(t) * (1 - x(t)); returns steps+1 rows including x0.
TimeSeries logistic_series(double r, double x0, long steps);

// Noisy copy of `signal` with noise variance mean(signal^2) / 10^(snr_db/10).
Eigen::VectorXd add_noise_snr(const Eigen::VectorXd& signal, const NoiseSpec& spec);

// Scalar-target experiment: inputs are the Lorenz states at times 0..steps-1,
// the target is the noisy sum of coordinates one step ahead.
struct SumSignalData {
    TimeSeries inputs;        // steps x 3
    Eigen::VectorXd target;   // length steps
};

SumSignalData sum_signal_experiment(const LorenzParams& p, long steps, const NoiseSpec& spec);

// Synthetic benchmark system of arbitrary even dimension built from
// independent two-dimensional quadratic maps. Columns come in pairs (u, v):
//   u' = 1 - a*u^2 + b*v,   v' = u
// with per-pair a near 1.4 and b = 0.3, in coordinates where both components
// have comparable scale. Trailing Gaussian measurement noise of standard
// deviation noise_sigma is added per column. The first N columns do not
// depend on the requested total dimension, so wider instances extend narrower
// ones.
TimeSeries surrogate_series(long T, int dim, std::uint64_t seed, double noise_sigma = 1e-5);

} // namespace isindy
