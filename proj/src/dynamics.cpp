#include "isindy/dynamics.hpp"
#include "isindy/errors.hpp"

#include <cmath>
#include <random>

namespace isindy {

namespace {

// splitmix64 finalizer; decorrelates per-stream seeds derived from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

Eigen::Vector3d lorenz_rhs(const LorenzParams& p, const Eigen::Vector3d& x) {
    return {p.sigma * (x(1) - x(0)),
            x(0) * (p.rho - x(2)) - x(1),
            x(0) * x(1) - p.alpha * x(2)};
}

TimeSeries simulate_lorenz(const LorenzParams& p, long steps) {
    if (p.dt <= 0.0) throw usage_error("simulate_lorenz: dt must be > 0");
    if (steps < 0) throw usage_error("simulate_lorenz: steps must be >= 0");
    TimeSeries ts;
    ts.dt = p.dt;
    ts.labels = {"x", "y", "z"};
    ts.samples.resize(steps + 1, 3);
    Eigen::Vector3d x = p.x0;
    ts.samples.row(0) = x.transpose();
    const double h = p.dt;
    for (long t = 0; t < steps; ++t) {
        const Eigen::Vector3d k1 = lorenz_rhs(p, x);
        const Eigen::Vector3d k2 = lorenz_rhs(p, x + 0.5 * h * k1);
        const Eigen::Vector3d k3 = lorenz_rhs(p, x + 0.5 * h * k2);
        const Eigen::Vector3d k4 = lorenz_rhs(p, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite())
            throw numeric_error("simulate_lorenz: non-finite state at step " + std::to_string(t + 1));
        ts.samples.row(t + 1) = x.transpose();
    }
    return ts;
}

TimeSeries logistic_series(double r, double x0, long steps) {
    if (steps < 0) throw usage_error("logistic_series: steps must be >= 0");
    TimeSeries ts;
    ts.labels = {"x"};
    ts.samples.resize(steps + 1, 1);
    double x = x0;
    ts.samples(0, 0) = x;
    for (long t = 0; t < steps; ++t) {
        x = r * x * (1.0 - x);
        if (!std::isfinite(x))
            throw numeric_error("logistic_series: non-finite state at step " + std::to_string(t + 1));
        ts.samples(t + 1, 0) = x;
    }
    return ts;
}

Eigen::VectorXd add_noise_snr(const Eigen::VectorXd& signal, const NoiseSpec& spec) {
    if (signal.size() == 0) throw data_error("add_noise_snr: empty signal");
    if (std::isinf(spec.snr_db) && spec.snr_db > 0.0) return signal;
    const double power = signal.squaredNorm() / static_cast<double>(signal.size());
    const double variance = power / std::pow(10.0, spec.snr_db / 10.0);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance));
    Eigen::VectorXd out = signal;
    for (long i = 0; i < out.size(); ++i) out(i) += gauss(rng);
    return out;
}

SumSignalData sum_signal_experiment(const LorenzParams& p, long steps, const NoiseSpec& spec) {
    if (steps < 1) throw usage_error("sum_signal_experiment: steps must be >= 1");
    const TimeSeries traj = simulate_lorenz(p, steps);
    SumSignalData out;
    out.inputs.dt = p.dt;
    out.inputs.labels = {"x", "y", "z"};
    out.inputs.samples = traj.samples.topRows(steps);
    Eigen::VectorXd clean = traj.samples.bottomRows(steps).rowwise().sum();
    out.target = add_noise_snr(clean, spec);
    return out;
}

TimeSeries surrogate_series(long T, int dim, std::uint64_t seed, double noise_sigma) {
    if (T < 1) throw usage_error("surrogate_series: need at least one row");
    if (dim < 2 || dim % 2 != 0)
        throw usage_error("surrogate_series: dimension must be even and >= 2, got " +
                          std::to_string(dim));
    const int pairs = dim / 2;
    const double b = 0.3;
    const long burn = 200;

    TimeSeries ts;
    ts.samples.resize(T, dim);
    ts.labels.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) ts.labels.push_back("x" + std::to_string(i + 1));

    for (int pidx = 0; pidx < pairs; ++pidx) {
        // Per-pair parameter stream keeps narrow instances prefixes of wide ones.
        std::mt19937_64 rng(mix_seed(seed, 0xA000u + static_cast<std::uint64_t>(pidx)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const double a = 1.4 - 0.02 * unif(rng);
        double u = 0.1, v = 0.1;
        for (long t = 0; t < burn; ++t) {
            const double un = 1.0 - a * u * u + b * v;
            v = u;
            u = un;
        }
        for (long t = 0; t < T; ++t) {
            ts.samples(t, 2 * pidx) = u;
            ts.samples(t, 2 * pidx + 1) = v;
            const double un = 1.0 - a * u * u + b * v;
            v = u;
            u = un;
            if (std::abs(u) > 10.0)
                throw numeric_error("surrogate_series: trajectory escaped at step " +
                                    std::to_string(t + 1));
        }
    }
    if (noise_sigma > 0.0) {
        for (int c = 0; c < dim; ++c) {
            std::mt19937_64 rng(mix_seed(seed, 0x51D0u + static_cast<std::uint64_t>(c)));
            std::normal_distribution<double> gauss(0.0, noise_sigma);
            for (long t = 0; t < T; ++t) ts.samples(t, c) += gauss(rng);
        }
    }
    return ts;
}

} // namespace isindy
