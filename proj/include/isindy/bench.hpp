#pragma once

#include "isindy/dynamics.hpp"
#include "isindy/engine.hpp"
#include "isindy/timeseries.hpp"

#include <map>
#include <string>
#include <vector>

namespace isindy {

// One sweep cell. Failed cells carry their error text in `detail` instead of
// aborting the sweep; skipped cells record why they were not run.
struct SweepRow {
    std::string sweep;          // beta | depth | dimension
    double param = 0.0;         // swept value
    int repetition = 0;
    std::string engine;         // iterative | conventional
    std::string status = "ok";  // ok | failed | skipped
    double modeling_err = 0.0;
    std::size_t total_order = 0;
    double mean_iterations = 0.0;
    double wall_seconds = 0.0;
    std::string dict_sizes;     // per-dimension size lists, "a|b;c|d"
    std::string detail;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    // Sorted keys keep emission deterministic. Carries the seed, the data
    // fingerprint, a config echo, and the (sequential) concurrency level.
    std::map<std::string, std::string> metadata;
};

// Fit both engines at every penalty value on fixed data. The grid must be
// sorted ascending. repetitions > 1 repeats identical cells (timing samples).
SweepResult beta_sweep(const TimeSeries& data, const std::vector<double>& grid,
                       const FitConfig& cfg, int repetitions = 1);

// Scalar-target variant: each repetition regenerates the sum-signal target
// with an independent noise seed, so averages are over noise realizations.
// The same repetition index reuses the same noise draw at every penalty.
SweepResult beta_sweep_sum_signal(const LorenzParams& p, long steps, double snr_db,
                                  const std::vector<double>& grid, const FitConfig& cfg,
                                  int repetitions, std::uint64_t seed);

// Vary the refinement depth / degree budget S for both engines.
SweepResult depth_sweep(const TimeSeries& data, const std::vector<int>& s_grid,
                        const FitConfig& cfg);

// Fit the leading N columns for each N in the grid. Conventional cells whose
// full dictionary would exceed the cap are marked skipped.
SweepResult dimension_sweep(const TimeSeries& data, const std::vector<int>& n_grid,
                            const FitConfig& cfg);

// Serialize a sweep to "csv" or "jsonl". Emission is a pure function of the
// result, so re-emitting the same result is byte-identical.
void emit(const SweepResult& result, const std::string& path, const std::string& format);

// Per-repetition mean of `mean_iterations` over ok rows at one (param, engine).
double mean_iterations_at(const SweepResult& result, double param, const std::string& engine);

} // namespace isindy
