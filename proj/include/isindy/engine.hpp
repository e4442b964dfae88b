#pragma once

#include "isindy/dictionary.hpp"
#include "isindy/solver.hpp"
#include "isindy/timeseries.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace isindy {

// Hyperparameters shared by both fitting engines.
struct FitConfig {
    int S = 4;                      // refinement rounds / degree budget
    double beta = 0.01;             // l1 penalty weight
    double survivor_tol = 1e-6;     // strict threshold tau on |coefficient|
    bool debias = true;             // unregularized refit on the survivor set
    bool per_dimension = true;      // independent dictionaries per output dim
    bool standardize = true;        // solver feature standardization
    double solver_tol = 1e-10;
    int max_sweeps = 10'000;
    std::size_t dict_cap = 1'000'000;
    bool obey_stopping_rule = true; // disable to force all S rounds
    double divergence_bound = 1e6;  // rollout guard
};

// One discovered equation: survivor terms with aligned coefficients.
struct DimensionModel {
    Dictionary terms;
    Eigen::VectorXd coefficients;
};

struct SparseModel {
    int ambient_dim = 0;
    std::vector<DimensionModel> equations;  // one per state dimension
    std::string engine;                     // "iterative" or "conventional"
    FitConfig config;                       // provenance echo
    std::uint64_t data_fingerprint = 0;

    std::size_t total_order() const;        // total number of retained terms
};

struct FitReport {
    std::string engine;
    std::vector<int> iterations_used;                  // per dimension
    std::vector<std::vector<std::size_t>> dict_sizes;  // per dimension, per round
    std::vector<bool> stopped;                         // stopping rule fired
    std::vector<bool> truncated;                       // dictionary cap hit
    double modeling_err = 0.0;
    std::size_t total_order = 0;
    double wall_seconds = 0.0;                         // fitting only
};

// Single-target fits; inputs are T x N sample rows, y the length-T target.
struct TargetFit {
    Dictionary dict;
    Eigen::VectorXd coefficients;
    int iterations = 0;
    std::vector<std::size_t> dict_sizes;
    bool stopped = false;
    bool truncated = false;
};

// Iterative dictionary refinement: starting from {1, x1..xN}, each round
// fits a sparse regression on the pairwise product of the previous survivor
// set with the unity set, keeps coefficients strictly above tau, and stops
// early once the survivor set repeats.
TargetFit fit_target_iterative(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& y,
                               const FitConfig& cfg);

// One sparse regression on the full monomial dictionary of degree S+1.
TargetFit fit_target_conventional(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& y,
                                  const FitConfig& cfg);

// Whole-series fits: inputs are rows 0..T-2, targets the next-step values.
std::pair<SparseModel, FitReport> fit_iterative(const TimeSeries& data, const FitConfig& cfg);
std::pair<SparseModel, FitReport> fit_conventional(const TimeSeries& data, const FitConfig& cfg);

// Strict |coefficient| > tau filter; canonical term order is preserved.
std::pair<Dictionary, Eigen::VectorXd> select_survivors(const Dictionary& dict,
                                                        const Eigen::VectorXd& coefficients,
                                                        double tau);

Eigen::VectorXd predict_one_step(const SparseModel& model, const Eigen::VectorXd& x);

struct RolloutResult {
    TimeSeries series;     // up to steps+1 rows including the initial state
    bool diverged = false; // a coordinate exceeded the divergence bound
};

RolloutResult rollout(const SparseModel& model, const Eigen::VectorXd& x0, long steps);

// Mean squared one-step residual: sum over dimensions and transitions of
// (x(t+1) - prediction)^2, divided by the number of transitions.
double modeling_error(const SparseModel& model, const TimeSeries& data);

// Text form, e.g. "x3' = 0.973·x3 + 0.010·x1·x2".
std::string equation_string(const SparseModel& model, int dim_index);

// Line-oriented model file; numbers round-trip bit-exactly.
void save_model(const SparseModel& model, const std::string& path);
SparseModel load_model(const std::string& path);

} // namespace isindy
