#include "isindy/bench.hpp"
#include "isindy/dictionary.hpp"
#include "isindy/dynamics.hpp"
#include "isindy/engine.hpp"
#include "isindy/errors.hpp"
#include "isindy/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace isindy;

// ISINDY_DICT_CAP overrides the configured dictionary cap.
void apply_env_cap(FitConfig& cfg) {
    const char* env = std::getenv("ISINDY_DICT_CAP");
    if (!env || !*env) return;
    unsigned long long v = 0;
    const char* end = env + std::string_view(env).size();
    auto [p, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || p != end || v < 1)
        throw usage_error("ISINDY_DICT_CAP: expected a positive integer, got '" + std::string(env) + "'");
    cfg.dict_cap = static_cast<std::size_t>(v);
}

TimeSeries load_input(const RunConfig& cfg) {
    if (!cfg.data_path.empty()) return read_csv(cfg.data_path);
    if (cfg.generator == "lorenz") {
        LorenzParams p;
        p.dt = cfg.dt;
        TimeSeries ts = simulate_lorenz(p, cfg.steps);
        if (!std::isinf(cfg.snr_db)) {
            NoiseSpec spec{cfg.snr_db, cfg.seed};
            for (long c = 0; c < ts.cols(); ++c) {
                NoiseSpec col_spec{spec.snr_db, spec.seed + static_cast<std::uint64_t>(c)};
                ts.samples.col(c) = add_noise_snr(ts.samples.col(c), col_spec);
            }
        }
        return ts;
    }
    if (cfg.generator == "logistic")
        return logistic_series(cfg.logistic_r, cfg.logistic_x0, cfg.steps);
    if (cfg.generator == "surrogate")
        return surrogate_series(cfg.steps, cfg.dim, cfg.seed);
    throw usage_error("no input: set data=<csv> or generator=lorenz|logistic|surrogate");
}

nlohmann::json report_json(const FitReport& r) {
    nlohmann::json j;
    j["engine"] = r.engine;
    j["iterations_used"] = r.iterations_used;
    j["dictionary_sizes"] = r.dict_sizes;
    j["stopping_rule_fired"] = std::vector<bool>(r.stopped.begin(), r.stopped.end());
    j["dictionary_truncated"] = std::vector<bool>(r.truncated.begin(), r.truncated.end());
    j["modeling_error"] = r.modeling_err;
    j["total_order"] = r.total_order;
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

int cmd_simulate(const std::string& system, long steps, double dt, double r, double x0,
                 int dim, std::uint64_t seed, double snr_db, const std::string& out_path) {
    TimeSeries ts;
    if (system == "lorenz") {
        LorenzParams p;
        p.dt = dt;
        ts = simulate_lorenz(p, steps);
    } else if (system == "logistic") {
        ts = logistic_series(r, x0, steps);
    } else if (system == "surrogate") {
        ts = surrogate_series(steps, dim, seed);
    } else {
        throw usage_error("simulate: unknown system '" + system + "'");
    }
    if (!std::isinf(snr_db)) {
        for (long c = 0; c < ts.cols(); ++c) {
            NoiseSpec spec{snr_db, seed + static_cast<std::uint64_t>(c)};
            ts.samples.col(c) = add_noise_snr(ts.samples.col(c), spec);
        }
    }
    write_csv(ts, out_path);
    std::cout << "wrote " << ts.rows() << "x" << ts.cols() << " series to " << out_path << "\n";
    return 0;
}

int cmd_fit(const RunConfig& cfg) {
    const TimeSeries data = load_input(cfg);
    const auto [model, report] = cfg.engine == "conventional"
                                     ? fit_conventional(data, cfg.fit)
                                     : fit_iterative(data, cfg.fit);
    for (int d = 0; d < model.ambient_dim; ++d)
        std::cout << equation_string(model, d) << "\n";
    std::cout << "modeling error: " << fmt_double(report.modeling_err)
              << "  total order: " << report.total_order
              << "  wall: " << fmt_double(report.wall_seconds) << "s\n";
    if (!cfg.out_model.empty()) {
        save_model(model, cfg.out_model);
        std::cout << "model written to " << cfg.out_model << "\n";
    }
    if (!cfg.out_report.empty()) {
        std::ofstream out(cfg.out_report, std::ios::binary);
        if (!out) throw data_error("cannot open '" + cfg.out_report + "' for writing");
        out << report_json(report).dump(2) << "\n";
        std::cout << "report written to " << cfg.out_report << "\n";
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& x0_text,
                const std::string& data_path, long steps, bool one_step,
                const std::string& out_path) {
    const SparseModel model = load_model(model_path);
    TimeSeries out;
    if (!data_path.empty()) {
        const TimeSeries ref = read_csv(data_path);
        if (ref.cols() != model.ambient_dim)
            throw data_error("predict: reference has " + std::to_string(ref.cols()) +
                             " columns, model expects " + std::to_string(model.ambient_dim));
        if (one_step) {
            // One-step predictions for rows 1..T-1 plus squared-residual column.
            if (ref.rows() < 2) throw data_error("predict: reference needs at least two rows");
            const long T = ref.rows();
            out.samples.resize(T - 1, model.ambient_dim + 1);
            for (long t = 0; t + 1 < T; ++t) {
                const Eigen::VectorXd pred =
                    predict_one_step(model, ref.samples.row(t).transpose());
                out.samples.block(t, 0, 1, model.ambient_dim) = pred.transpose();
                out.samples(t, model.ambient_dim) =
                    (ref.samples.row(t + 1).transpose() - pred).squaredNorm();
            }
            for (int c = 0; c < model.ambient_dim; ++c)
                out.labels.push_back("pred" + std::to_string(c + 1));
            out.labels.push_back("sq_error");
        } else {
            const long n = steps > 0 ? steps : ref.rows() - 1;
            const RolloutResult roll = rollout(model, ref.samples.row(0).transpose(), n);
            const long T = std::min(roll.series.rows(), ref.rows());
            out.samples.resize(roll.series.rows(), model.ambient_dim + 1);
            out.samples.setConstant(std::numeric_limits<double>::quiet_NaN());
            out.samples.leftCols(model.ambient_dim) = roll.series.samples;
            for (long t = 0; t < T; ++t)
                out.samples(t, model.ambient_dim) =
                    (roll.series.samples.row(t) - ref.samples.row(t)).squaredNorm();
            // NaN rows cannot be written; trim to the compared range.
            out.samples.conservativeResize(T, Eigen::NoChange);
            for (int c = 0; c < model.ambient_dim; ++c)
                out.labels.push_back("x" + std::to_string(c + 1));
            out.labels.push_back("sq_error");
            if (roll.diverged) std::cout << "rollout diverged\n";
        }
    } else {
        if (x0_text.empty()) throw usage_error("predict: need --data or --x0");
        Eigen::VectorXd x0(model.ambient_dim);
        {
            std::string_view v(x0_text);
            long idx = 0;
            std::size_t start = 0;
            while (true) {
                const std::size_t pos = v.find(',', start);
                const std::string tok{v.substr(start, pos == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : pos - start)};
                if (idx >= model.ambient_dim)
                    throw usage_error("predict: --x0 has too many entries for dimension " +
                                      std::to_string(model.ambient_dim));
                x0(idx++) = parse_double(tok, "--x0");
                if (pos == std::string_view::npos) break;
                start = pos + 1;
            }
            if (idx != model.ambient_dim)
                throw usage_error("predict: --x0 has " + std::to_string(idx) +
                                  " entries, model expects " + std::to_string(model.ambient_dim));
        }
        const RolloutResult roll = rollout(model, x0, steps);
        out = roll.series;
        for (int c = 0; c < model.ambient_dim; ++c)
            out.labels.push_back("x" + std::to_string(c + 1));
        if (roll.diverged) std::cout << "rollout diverged\n";
    }
    write_csv(out, out_path);
    std::cout << "wrote " << out.rows() << "x" << out.cols() << " to " << out_path << "\n";
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    if (cfg.sweep.empty())
        throw usage_error("bench: config must set sweep = beta | depth | dimension");
    if (cfg.out_results.empty())
        throw usage_error("bench: config must set out_results");
    SweepResult res;
    if (cfg.sweep == "beta") {
        if (cfg.beta_grid.empty()) throw usage_error("bench: beta_grid is empty");
        if (cfg.generator == "lorenz" && !std::isinf(cfg.snr_db)) {
            LorenzParams p;
            p.dt = cfg.dt;
            res = beta_sweep_sum_signal(p, cfg.steps, cfg.snr_db, cfg.beta_grid, cfg.fit,
                                        cfg.repetitions, cfg.seed);
        } else {
            res = beta_sweep(load_input(cfg), cfg.beta_grid, cfg.fit, cfg.repetitions);
        }
    } else if (cfg.sweep == "depth") {
        if (cfg.s_grid.empty()) throw usage_error("bench: S_grid is empty");
        res = depth_sweep(load_input(cfg), cfg.s_grid, cfg.fit);
    } else {
        if (cfg.n_grid.empty()) throw usage_error("bench: N_grid is empty");
        res = dimension_sweep(load_input(cfg), cfg.n_grid, cfg.fit);
    }
    res.metadata["seed"] = std::to_string(cfg.seed);
    emit(res, cfg.out_results, cfg.format);
    std::cout << "wrote " << res.rows.size() << " rows to " << cfg.out_results << "\n";
    return 0;
}

int cmd_inspect(const std::string& model_path) {
    const SparseModel model = load_model(model_path);
    std::cout << "engine: " << model.engine << "\n";
    std::cout << "dimensions: " << model.ambient_dim << "\n";
    char fp[17];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(model.data_fingerprint));
    std::cout << "data fingerprint: " << fp << "\n";
    std::cout << "config: S=" << model.config.S << " beta=" << fmt_double(model.config.beta)
              << " tau=" << fmt_double(model.config.survivor_tol)
              << " debias=" << (model.config.debias ? "true" : "false") << "\n";
    std::cout << "total order: " << model.total_order() << "\n";
    for (int d = 0; d < model.ambient_dim; ++d)
        std::cout << equation_string(model, d) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse system identification by iterative dictionary refinement"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a trajectory CSV");
    std::string sim_system, sim_out;
    long sim_steps = 1000;
    double sim_dt = 0.01, sim_r = 3.9, sim_x0 = 0.5;
    double sim_snr = std::numeric_limits<double>::infinity();
    int sim_dim = 6;
    std::uint64_t sim_seed = 0;
    sim->add_option("--system", sim_system, "lorenz | logistic | surrogate")->required();
    sim->add_option("--steps", sim_steps, "number of update steps");
    sim->add_option("--dt", sim_dt, "integrator step (lorenz)");
    sim->add_option("--r", sim_r, "logistic growth rate");
    sim->add_option("--x0", sim_x0, "logistic initial value");
    sim->add_option("--N", sim_dim, "surrogate dimension (even)");
    sim->add_option("--seed", sim_seed, "noise / parameter seed");
    sim->add_option("--snr-db", sim_snr, "additive noise level in dB");
    sim->add_option("--out", sim_out, "output CSV path")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "fit a sparse model to a series");
    std::string fit_config, fit_data, fit_engine, fit_out, fit_report;
    std::optional<double> fit_beta, fit_tau;
    std::optional<int> fit_S;
    std::optional<std::uint64_t> fit_seed;
    fit->add_option("--config", fit_config, "key = value config file");
    fit->add_option("--data", fit_data, "input CSV (overrides config)");
    fit->add_option("--engine", fit_engine, "iterative | conventional");
    fit->add_option("--beta", fit_beta, "l1 penalty");
    fit->add_option("--S", fit_S, "refinement rounds / degree budget");
    fit->add_option("--tau", fit_tau, "survivor threshold");
    fit->add_option("--seed", fit_seed, "generator seed");
    fit->add_option("--out", fit_out, "model file path");
    fit->add_option("--report", fit_report, "fit report JSON path");

    // predict
    auto* pred = app.add_subcommand("predict", "roll a fitted model forward");
    std::string pred_model, pred_x0, pred_data, pred_out;
    long pred_steps = 0;
    bool pred_one_step = false;
    pred->add_option("--model", pred_model, "model file")->required();
    pred->add_option("--x0", pred_x0, "comma-separated initial state");
    pred->add_option("--data", pred_data, "reference series CSV");
    pred->add_option("--steps", pred_steps, "rollout length");
    pred->add_flag("--one-step", pred_one_step, "one-step predictions along --data");
    pred->add_option("--out", pred_out, "output CSV path")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "run a parameter sweep");
    std::string bench_config;
    std::string bench_format;
    bench->add_option("--config", bench_config, "sweep config file")->required();
    bench->add_option("--format", bench_format, "csv | jsonl (overrides config)");

    // inspect
    auto* insp = app.add_subcommand("inspect", "print a model file");
    std::string insp_model;
    insp->add_option("--model", insp_model, "model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_system, sim_steps, sim_dt, sim_r, sim_x0, sim_dim, sim_seed,
                                sim_snr, sim_out);
        if (fit->parsed()) {
            RunConfig cfg;
            if (!fit_config.empty()) cfg = load_config(fit_config);
            if (!fit_data.empty()) cfg.data_path = fit_data;
            if (!fit_engine.empty()) {
                if (fit_engine != "iterative" && fit_engine != "conventional")
                    throw usage_error("--engine: expected iterative or conventional");
                cfg.engine = fit_engine;
            }
            if (fit_beta) {
                if (*fit_beta < 0) throw usage_error("--beta must be >= 0");
                cfg.fit.beta = *fit_beta;
            }
            if (fit_S) {
                if (*fit_S < 1) throw usage_error("--S must be >= 1");
                cfg.fit.S = *fit_S;
            }
            if (fit_tau) {
                if (*fit_tau < 0) throw usage_error("--tau must be >= 0");
                cfg.fit.survivor_tol = *fit_tau;
            }
            if (fit_seed) cfg.seed = *fit_seed;
            if (!fit_out.empty()) cfg.out_model = fit_out;
            if (!fit_report.empty()) cfg.out_report = fit_report;
            apply_env_cap(cfg.fit);
            return cmd_fit(cfg);
        }
        if (pred->parsed())
            return cmd_predict(pred_model, pred_x0, pred_data, pred_steps, pred_one_step, pred_out);
        if (bench->parsed()) {
            RunConfig cfg = load_config(bench_config);
            if (!bench_format.empty()) {
                if (bench_format != "csv" && bench_format != "jsonl")
                    throw usage_error("--format: expected csv or jsonl");
                cfg.format = bench_format;
            }
            apply_env_cap(cfg.fit);
            return cmd_bench(cfg);
        }
        if (insp->parsed()) return cmd_inspect(insp_model);
        throw usage_error("no subcommand given");
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
