#include "isindy/bench.hpp"
#include "isindy/errors.hpp"
#include "isindy/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace isindy {

namespace {

using clock_type = std::chrono::steady_clock;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string join_sizes(const std::vector<std::vector<std::size_t>>& sizes) {
    std::string out;
    for (std::size_t d = 0; d < sizes.size(); ++d) {
        if (d) out += ';';
        for (std::size_t i = 0; i < sizes[d].size(); ++i) {
            if (i) out += '|';
            out += std::to_string(sizes[d][i]);
        }
    }
    return out;
}

double mean_of(const std::vector<int>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void fill_config_metadata(SweepResult& res, const FitConfig& cfg) {
    res.metadata["concurrency"] = "1";
    res.metadata["config.S"] = std::to_string(cfg.S);
    res.metadata["config.beta"] = fmt_double(cfg.beta);
    res.metadata["config.tau"] = fmt_double(cfg.survivor_tol);
    res.metadata["config.debias"] = cfg.debias ? "true" : "false";
    res.metadata["config.per_dimension"] = cfg.per_dimension ? "true" : "false";
    res.metadata["config.standardize"] = cfg.standardize ? "true" : "false";
    res.metadata["config.dict_cap"] = std::to_string(cfg.dict_cap);
}

SweepRow run_series_cell(const std::string& sweep, double param, int rep,
                         const std::string& engine, const TimeSeries& data,
                         const FitConfig& cfg) {
    SweepRow row;
    row.sweep = sweep;
    row.param = param;
    row.repetition = rep;
    row.engine = engine;
    try {
        const auto [model, report] =
            engine == "iterative" ? fit_iterative(data, cfg) : fit_conventional(data, cfg);
        row.modeling_err = report.modeling_err;
        row.total_order = report.total_order;
        row.mean_iterations = mean_of(report.iterations_used);
        row.wall_seconds = report.wall_seconds;
        row.dict_sizes = join_sizes(report.dict_sizes);
    } catch (const std::exception& e) {
        row.status = "failed";
        row.detail = e.what();
    }
    return row;
}

void require_ascending(const std::vector<double>& grid, const char* who) {
    if (grid.empty()) throw usage_error(std::string(who) + ": empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw usage_error(std::string(who) + ": grid must be sorted ascending");
}

} // namespace

SweepResult beta_sweep(const TimeSeries& data, const std::vector<double>& grid,
                       const FitConfig& cfg, int repetitions) {
    require_ascending(grid, "beta_sweep");
    if (repetitions < 1) throw usage_error("beta_sweep: repetitions must be >= 1");
    SweepResult res;
    res.metadata["sweep"] = "beta";
    res.metadata["fingerprint"] = hex64(fingerprint(data));
    res.metadata["repetitions"] = std::to_string(repetitions);
    fill_config_metadata(res, cfg);
    for (double beta : grid) {
        FitConfig cell = cfg;
        cell.beta = beta;
        for (const char* engine : {"iterative", "conventional"})
            for (int rep = 0; rep < repetitions; ++rep)
                res.rows.push_back(run_series_cell("beta", beta, rep, engine, data, cell));
    }
    return res;
}

SweepResult beta_sweep_sum_signal(const LorenzParams& p, long steps, double snr_db,
                                  const std::vector<double>& grid, const FitConfig& cfg,
                                  int repetitions, std::uint64_t seed) {
    require_ascending(grid, "beta_sweep_sum_signal");
    if (repetitions < 1) throw usage_error("beta_sweep_sum_signal: repetitions must be >= 1");
    SweepResult res;
    res.metadata["sweep"] = "beta";
    res.metadata["variant"] = "sum-signal";
    res.metadata["seed"] = std::to_string(seed);
    res.metadata["snr_db"] = fmt_double(snr_db);
    res.metadata["steps"] = std::to_string(steps);
    res.metadata["repetitions"] = std::to_string(repetitions);
    fill_config_metadata(res, cfg);

    // One trajectory; per-repetition targets differ only in the noise seed,
    // and the draw for repetition r is shared across the whole grid.
    const TimeSeries traj = simulate_lorenz(p, steps);
    res.metadata["fingerprint"] = hex64(fingerprint(traj));
    std::vector<Eigen::VectorXd> targets;
    targets.reserve(static_cast<std::size_t>(repetitions));
    Eigen::VectorXd clean = traj.samples.bottomRows(steps).rowwise().sum();
    for (int rep = 0; rep < repetitions; ++rep)
        targets.push_back(add_noise_snr(clean, NoiseSpec{snr_db, seed + static_cast<std::uint64_t>(rep)}));
    const Eigen::MatrixXd inputs = traj.samples.topRows(steps);

    for (double beta : grid) {
        FitConfig cell = cfg;
        cell.beta = beta;
        for (int rep = 0; rep < repetitions; ++rep) {
            SweepRow row;
            row.sweep = "beta";
            row.param = beta;
            row.repetition = rep;
            row.engine = "iterative";
            try {
                const auto start = clock_type::now();
                const TargetFit fit = fit_target_iterative(inputs, targets[static_cast<std::size_t>(rep)], cell);
                row.wall_seconds = std::chrono::duration<double>(clock_type::now() - start).count();
                Eigen::VectorXd pred = Eigen::VectorXd::Zero(steps);
                if (!fit.dict.terms.empty())
                    pred = evaluate(fit.dict, inputs).values.transpose() * fit.coefficients;
                row.modeling_err =
                    (targets[static_cast<std::size_t>(rep)] - pred).squaredNorm() /
                    static_cast<double>(steps);
                row.total_order = static_cast<std::size_t>(
                    (fit.coefficients.array() != 0.0).count());
                row.mean_iterations = fit.iterations;
                row.dict_sizes = join_sizes({fit.dict_sizes});
            } catch (const std::exception& e) {
                row.status = "failed";
                row.detail = e.what();
            }
            res.rows.push_back(row);
        }
    }
    return res;
}

SweepResult depth_sweep(const TimeSeries& data, const std::vector<int>& s_grid,
                        const FitConfig& cfg) {
    if (s_grid.empty()) throw usage_error("depth_sweep: empty grid");
    if (!std::is_sorted(s_grid.begin(), s_grid.end()))
        throw usage_error("depth_sweep: grid must be sorted ascending");
    SweepResult res;
    res.metadata["sweep"] = "depth";
    res.metadata["fingerprint"] = hex64(fingerprint(data));
    res.metadata["repetitions"] = "1";
    fill_config_metadata(res, cfg);
    for (int s : s_grid) {
        FitConfig cell = cfg;
        cell.S = s;
        for (const char* engine : {"iterative", "conventional"})
            res.rows.push_back(run_series_cell("depth", s, 0, engine, data, cell));
    }
    return res;
}

SweepResult dimension_sweep(const TimeSeries& data, const std::vector<int>& n_grid,
                            const FitConfig& cfg) {
    if (n_grid.empty()) throw usage_error("dimension_sweep: empty grid");
    if (!std::is_sorted(n_grid.begin(), n_grid.end()))
        throw usage_error("dimension_sweep: grid must be sorted ascending");
    SweepResult res;
    res.metadata["sweep"] = "dimension";
    res.metadata["fingerprint"] = hex64(fingerprint(data));
    res.metadata["repetitions"] = "1";
    fill_config_metadata(res, cfg);
    for (int n : n_grid) {
        if (n < 1 || n > data.cols())
            throw usage_error("dimension_sweep: N=" + std::to_string(n) + " outside 1.." +
                              std::to_string(data.cols()));
        TimeSeries slice;
        slice.dt = data.dt;
        slice.samples = data.samples.leftCols(n);
        if (data.labels.size() >= static_cast<std::size_t>(n))
            slice.labels.assign(data.labels.begin(), data.labels.begin() + n);
        for (const char* engine : {"iterative", "conventional"}) {
            bool skip = false;
            std::string why;
            if (std::string(engine) == "conventional") {
                try {
                    if (dictionary_size(n, cfg.S + 1) > cfg.dict_cap) {
                        skip = true;
                        why = "dictionary size " + std::to_string(dictionary_size(n, cfg.S + 1)) +
                              " exceeds cap " + std::to_string(cfg.dict_cap);
                    }
                } catch (const numeric_error& e) {
                    skip = true;
                    why = e.what();
                }
            }
            if (skip) {
                SweepRow row;
                row.sweep = "dimension";
                row.param = n;
                row.engine = engine;
                row.status = "skipped";
                row.detail = why;
                res.rows.push_back(row);
            } else {
                res.rows.push_back(run_series_cell("dimension", n, 0, engine, slice, cfg));
            }
        }
    }
    return res;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace

void emit(const SweepResult& result, const std::string& path, const std::string& format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("emit: cannot open '" + path + "' for writing");
    if (format == "csv") {
        out << "# sweep results\n";
        for (const auto& [k, v] : result.metadata)
            out << "# meta " << k << "=" << v << "\n";
        out << "# columns: sweep,param,repetition,engine,status,modeling_error,total_order,"
               "mean_iterations,wall_seconds,dict_sizes,detail\n";
        out << "sweep,param,repetition,engine,status,modeling_error,total_order,"
               "mean_iterations,wall_seconds,dict_sizes,detail\n";
        for (const auto& r : result.rows) {
            out << r.sweep << ',' << fmt_double(r.param) << ',' << r.repetition << ','
                << r.engine << ',' << r.status << ',' << fmt_double(r.modeling_err) << ','
                << r.total_order << ',' << fmt_double(r.mean_iterations) << ','
                << fmt_double(r.wall_seconds) << ',' << csv_escape(r.dict_sizes) << ','
                << csv_escape(r.detail) << '\n';
        }
    } else if (format == "jsonl") {
        nlohmann::json meta;
        meta["type"] = "metadata";
        for (const auto& [k, v] : result.metadata) meta[k] = v;
        out << meta.dump() << '\n';
        for (const auto& r : result.rows) {
            nlohmann::json j;
            j["type"] = "row";
            j["sweep"] = r.sweep;
            j["param"] = r.param;
            j["repetition"] = r.repetition;
            j["engine"] = r.engine;
            j["status"] = r.status;
            j["modeling_error"] = r.modeling_err;
            j["total_order"] = r.total_order;
            j["mean_iterations"] = r.mean_iterations;
            j["wall_seconds"] = r.wall_seconds;
            j["dict_sizes"] = r.dict_sizes;
            j["detail"] = r.detail;
            out << j.dump() << '\n';
        }
    } else {
        throw usage_error("emit: unknown format '" + format + "' (expected csv or jsonl)");
    }
    if (!out) throw data_error("emit: write to '" + path + "' failed");
}

double mean_iterations_at(const SweepResult& result, double param, const std::string& engine) {
    double sum = 0.0;
    long n = 0;
    for (const auto& r : result.rows) {
        if (r.status == "ok" && r.engine == engine && r.param == param) {
            sum += r.mean_iterations;
            ++n;
        }
    }
    if (n == 0) throw usage_error("mean_iterations_at: no ok rows at that parameter");
    return sum / static_cast<double>(n);
}

} // namespace isindy
