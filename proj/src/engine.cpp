#include "isindy/engine.hpp"
#include "isindy/errors.hpp"
#include "isindy/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace isindy {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

LassoOptions solver_options(const FitConfig& cfg) {
    LassoOptions o;
    o.beta = cfg.beta;
    o.max_sweeps = cfg.max_sweeps;
    o.tol = cfg.solver_tol;
    o.standardize = cfg.standardize;
    return o;
}

// Regularized coefficients for one dictionary; beta = 0 falls back to the
// minimum-norm least-squares path.
Eigen::VectorXd solve_round(const FeatureMatrix& fm, const Eigen::VectorXd& y,
                            const FitConfig& cfg, const Eigen::VectorXd* warm) {
    if (cfg.beta == 0.0) return least_squares_pinv(fm.values, y);
    return lasso(fm.values, y, solver_options(cfg), warm).coefficients;
}

Eigen::VectorXd debias_on(const Dictionary& dict, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& y) {
    const FeatureMatrix fm = evaluate(dict, inputs);
    return least_squares_pinv(fm.values, y);
}

struct hash_monomial {
    std::size_t operator()(const std::vector<int>& e) const {
        std::size_t h = 1469598103934665603ull;
        for (int v : e) {
            h ^= static_cast<std::size_t>(v) + 0x9E3779B9u;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Carry coefficients from the previous round onto a new dictionary by
// monomial identity; terms absent from the previous round start at zero.
Eigen::VectorXd map_warm_start(const Dictionary& prev, const Eigen::VectorXd& prev_coefs,
                               const Dictionary& next) {
    std::unordered_map<std::vector<int>, double, hash_monomial> lookup;
    lookup.reserve(prev.terms.size());
    for (std::size_t k = 0; k < prev.terms.size(); ++k)
        lookup.emplace(prev.terms[k].exponents, prev_coefs(static_cast<long>(k)));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(next.terms.size()));
    for (std::size_t k = 0; k < next.terms.size(); ++k) {
        if (auto it = lookup.find(next.terms[k].exponents); it != lookup.end())
            out(static_cast<long>(k)) = it->second;
    }
    return out;
}

void truncate_to_cap(Dictionary& d, std::size_t cap, bool& flag) {
    if (d.size() > cap) {
        d.terms.resize(cap);
        flag = true;
    }
}

void check_inputs(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& y,
                  const char* who) {
    if (inputs.rows() != y.size())
        throw data_error(std::string(who) + ": " + std::to_string(inputs.rows()) +
                         " input rows vs " + std::to_string(y.size()) + " target values");
    if (inputs.rows() < 1) throw data_error(std::string(who) + ": no samples");
    if (inputs.cols() < 1) throw data_error(std::string(who) + ": no input columns");
}

} // namespace

std::size_t SparseModel::total_order() const {
    std::size_t n = 0;
    for (const auto& eq : equations)
        for (long k = 0; k < eq.coefficients.size(); ++k)
            if (eq.coefficients(k) != 0.0) ++n;
    return n;
}

std::pair<Dictionary, Eigen::VectorXd> select_survivors(const Dictionary& dict,
                                                        const Eigen::VectorXd& coefficients,
                                                        double tau) {
    if (static_cast<std::size_t>(coefficients.size()) != dict.terms.size())
        throw usage_error("select_survivors: coefficient count does not match dictionary");
    Dictionary out;
    out.ambient_dim = dict.ambient_dim;
    std::vector<double> kept;
    for (std::size_t k = 0; k < dict.terms.size(); ++k) {
        if (std::abs(coefficients(static_cast<long>(k))) > tau) {
            out.terms.push_back(dict.terms[k]);
            kept.push_back(coefficients(static_cast<long>(k)));
        }
    }
    Eigen::VectorXd c(static_cast<long>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) c(static_cast<long>(k)) = kept[k];
    return {out, c};
}

TargetFit fit_target_iterative(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& y,
                               const FitConfig& cfg) {
    check_inputs(inputs, y, "fit_target_iterative");
    if (cfg.S < 1) throw usage_error("fit_target_iterative: S must be >= 1");
    const int N = static_cast<int>(inputs.cols());
    const Dictionary unity = unity_set(N);

    TargetFit out;
    Dictionary prev_set = unity;  // comparison basis for the stopping rule
    Eigen::VectorXd prev_coefs = Eigen::VectorXd::Zero(static_cast<long>(unity.size()));
    Dictionary survivors;
    Eigen::VectorXd survivor_coefs;

    for (int round = 1; round <= cfg.S; ++round) {
        Dictionary dict = expand(prev_set, unity);
        truncate_to_cap(dict, cfg.dict_cap, out.truncated);
        const FeatureMatrix fm = evaluate(dict, inputs);
        const Eigen::VectorXd warm = map_warm_start(prev_set, prev_coefs, dict);
        const Eigen::VectorXd b = solve_round(fm, y, cfg, &warm);
        std::tie(survivors, survivor_coefs) = select_survivors(dict, b, cfg.survivor_tol);
        out.iterations = round;
        out.dict_sizes.push_back(dict.size());
        const bool repeated = survivors.terms == prev_set.terms;
        const bool empty = survivors.terms.empty();
        prev_set = survivors;
        prev_coefs = survivor_coefs;
        if ((repeated || empty) && cfg.obey_stopping_rule) {
            out.stopped = true;
            break;
        }
        if (empty) {
            out.stopped = true;  // nothing left to expand even when forced on
            break;
        }
    }

    out.dict = survivors;
    out.coefficients = survivor_coefs;
    if (cfg.debias && !out.dict.terms.empty())
        out.coefficients = debias_on(out.dict, inputs, y);
    return out;
}

TargetFit fit_target_conventional(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& y,
                                  const FitConfig& cfg) {
    check_inputs(inputs, y, "fit_target_conventional");
    if (cfg.S < 0) throw usage_error("fit_target_conventional: S must be >= 0");
    const int N = static_cast<int>(inputs.cols());
    // Throws when the degree-(S+1) dictionary exceeds the cap.
    const Dictionary dict = full_dictionary(N, cfg.S + 1, cfg.dict_cap);
    const FeatureMatrix fm = evaluate(dict, inputs);
    const Eigen::VectorXd b = solve_round(fm, y, cfg, nullptr);

    TargetFit out;
    out.iterations = 1;
    out.dict_sizes.push_back(dict.size());
    std::tie(out.dict, out.coefficients) = select_survivors(dict, b, cfg.survivor_tol);
    if (cfg.debias && !out.dict.terms.empty())
        out.coefficients = debias_on(out.dict, inputs, y);
    return out;
}

namespace {

void check_series(const TimeSeries& data, const char* who) {
    if (data.rows() < 2)
        throw data_error(std::string(who) + ": need at least two rows, got " +
                         std::to_string(data.rows()));
    if (data.cols() < 1) throw data_error(std::string(who) + ": series has no columns");
    if (!data.samples.allFinite())
        throw data_error(std::string(who) + ": series contains non-finite values");
}

std::pair<SparseModel, FitReport> assemble(const TimeSeries& data, const FitConfig& cfg,
                                           const std::string& engine,
                                           std::vector<TargetFit> fits, double wall) {
    SparseModel model;
    model.ambient_dim = static_cast<int>(data.cols());
    model.engine = engine;
    model.config = cfg;
    model.data_fingerprint = fingerprint(data);
    FitReport report;
    report.engine = engine;
    for (auto& f : fits) {
        model.equations.push_back(DimensionModel{std::move(f.dict), std::move(f.coefficients)});
        report.iterations_used.push_back(f.iterations);
        report.dict_sizes.push_back(std::move(f.dict_sizes));
        report.stopped.push_back(f.stopped);
        report.truncated.push_back(f.truncated);
    }
    report.wall_seconds = wall;
    report.total_order = model.total_order();
    report.modeling_err = modeling_error(model, data);
    return {std::move(model), std::move(report)};
}

// Shared-dictionary variant: one dictionary evolves from the union of the
// per-dimension survivor sets.
std::vector<TargetFit> fit_all_shared(const Eigen::MatrixXd& inputs,
                                      const Eigen::MatrixXd& targets, const FitConfig& cfg) {
    const int N = static_cast<int>(inputs.cols());
    const Dictionary unity = unity_set(N);
    const long D = targets.cols();

    std::vector<TargetFit> fits(static_cast<std::size_t>(D));
    Dictionary prev_union = unity;
    std::vector<Eigen::VectorXd> prev_coefs(static_cast<std::size_t>(D));
    std::vector<Dictionary> prev_dicts(static_cast<std::size_t>(D), unity);
    for (auto& c : prev_coefs) c = Eigen::VectorXd::Zero(static_cast<long>(unity.size()));

    bool truncated = false;
    bool stopped = false;
    int rounds = 0;
    std::vector<std::size_t> sizes;
    for (int round = 1; round <= cfg.S; ++round) {
        Dictionary dict = expand(prev_union, unity);
        truncate_to_cap(dict, cfg.dict_cap, truncated);
        const FeatureMatrix fm = evaluate(dict, inputs);
        rounds = round;
        sizes.push_back(dict.size());
        Dictionary next_union;
        next_union.ambient_dim = N;
        for (long d = 0; d < D; ++d) {
            const std::size_t di = static_cast<std::size_t>(d);
            const Eigen::VectorXd warm = map_warm_start(prev_dicts[di], prev_coefs[di], dict);
            const Eigen::VectorXd b = solve_round(fm, targets.col(d), cfg, &warm);
            auto [surv, coefs] = select_survivors(dict, b, cfg.survivor_tol);
            fits[di].dict = surv;
            fits[di].coefficients = coefs;
            prev_dicts[di] = std::move(surv);
            prev_coefs[di] = std::move(coefs);
            for (const auto& m : prev_dicts[di].terms) next_union.terms.push_back(m);
        }
        std::sort(next_union.terms.begin(), next_union.terms.end(), canonical_less);
        next_union.terms.erase(std::unique(next_union.terms.begin(), next_union.terms.end()),
                               next_union.terms.end());
        const bool repeated = next_union.terms == prev_union.terms;
        const bool empty = next_union.terms.empty();
        prev_union = std::move(next_union);
        if (((repeated || empty) && cfg.obey_stopping_rule) || empty) {
            stopped = true;
            break;
        }
    }
    for (long d = 0; d < D; ++d) {
        auto& f = fits[static_cast<std::size_t>(d)];
        f.iterations = rounds;
        f.dict_sizes = sizes;
        f.stopped = stopped;
        f.truncated = truncated;
        if (cfg.debias && !f.dict.terms.empty())
            f.coefficients = debias_on(f.dict, inputs, targets.col(d));
    }
    return fits;
}

} // namespace

std::pair<SparseModel, FitReport> fit_iterative(const TimeSeries& data, const FitConfig& cfg) {
    check_series(data, "fit_iterative");
    const long T = data.rows();
    const Eigen::MatrixXd inputs = data.samples.topRows(T - 1);
    const Eigen::MatrixXd targets = data.samples.bottomRows(T - 1);

    const auto start = clock_type::now();
    std::vector<TargetFit> fits;
    if (cfg.per_dimension) {
        for (long d = 0; d < data.cols(); ++d)
            fits.push_back(fit_target_iterative(inputs, targets.col(d), cfg));
    } else {
        fits = fit_all_shared(inputs, targets, cfg);
    }
    const double wall = seconds_since(start);
    return assemble(data, cfg, "iterative", std::move(fits), wall);
}

std::pair<SparseModel, FitReport> fit_conventional(const TimeSeries& data, const FitConfig& cfg) {
    check_series(data, "fit_conventional");
    const long T = data.rows();
    const Eigen::MatrixXd inputs = data.samples.topRows(T - 1);
    const Eigen::MatrixXd targets = data.samples.bottomRows(T - 1);

    const auto start = clock_type::now();
    std::vector<TargetFit> fits;
    for (long d = 0; d < data.cols(); ++d)
        fits.push_back(fit_target_conventional(inputs, targets.col(d), cfg));
    const double wall = seconds_since(start);
    return assemble(data, cfg, "conventional", std::move(fits), wall);
}

Eigen::VectorXd predict_one_step(const SparseModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.ambient_dim)
        throw data_error("predict_one_step: state has " + std::to_string(x.size()) +
                         " entries, model expects " + std::to_string(model.ambient_dim));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(model.ambient_dim);
    for (std::size_t d = 0; d < model.equations.size(); ++d) {
        const auto& eq = model.equations[d];
        if (eq.terms.terms.empty()) continue;  // empty equation predicts zero
        out(static_cast<long>(d)) = evaluate_at(eq.terms, x).dot(eq.coefficients);
    }
    return out;
}

RolloutResult rollout(const SparseModel& model, const Eigen::VectorXd& x0, long steps) {
    if (steps < 0) throw usage_error("rollout: steps must be >= 0");
    RolloutResult res;
    std::vector<Eigen::VectorXd> rows;
    rows.reserve(static_cast<std::size_t>(steps) + 1);
    rows.push_back(x0);
    Eigen::VectorXd x = x0;
    const double bound = model.config.divergence_bound;
    for (long t = 0; t < steps; ++t) {
        x = predict_one_step(model, x);
        rows.push_back(x);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > bound) {
            res.diverged = true;
            break;
        }
    }
    res.series.samples.resize(static_cast<long>(rows.size()), model.ambient_dim);
    for (std::size_t t = 0; t < rows.size(); ++t)
        res.series.samples.row(static_cast<long>(t)) = rows[t].transpose();
    return res;
}

double modeling_error(const SparseModel& model, const TimeSeries& data) {
    check_series(data, "modeling_error");
    if (data.cols() != model.ambient_dim)
        throw data_error("modeling_error: series has " + std::to_string(data.cols()) +
                         " columns, model expects " + std::to_string(model.ambient_dim));
    const long T = data.rows();
    const Eigen::MatrixXd inputs = data.samples.topRows(T - 1);
    double total = 0.0;
    for (std::size_t d = 0; d < model.equations.size(); ++d) {
        const auto& eq = model.equations[d];
        Eigen::VectorXd pred = Eigen::VectorXd::Zero(T - 1);
        if (!eq.terms.terms.empty()) {
            const FeatureMatrix fm = evaluate(eq.terms, inputs);
            pred = fm.values.transpose() * eq.coefficients;
        }
        total += (data.samples.col(static_cast<long>(d)).tail(T - 1) - pred).squaredNorm();
    }
    return total / static_cast<double>(T - 1);
}

std::string equation_string(const SparseModel& model, int dim_index) {
    if (dim_index < 0 || static_cast<std::size_t>(dim_index) >= model.equations.size())
        throw usage_error("equation_string: dimension index out of range");
    const auto& eq = model.equations[static_cast<std::size_t>(dim_index)];
    std::string out = "x" + std::to_string(dim_index + 1) + "' = ";
    if (eq.terms.terms.empty()) return out + "0";
    bool first = true;
    for (std::size_t k = 0; k < eq.terms.terms.size(); ++k) {
        const double c = eq.coefficients(static_cast<long>(k));
        const double a = std::abs(c);
        char buf[48];
        if (a != 0.0 && (a < 1e-3 || a >= 1e4))
            std::snprintf(buf, sizeof buf, "%.3e", a);
        else
            std::snprintf(buf, sizeof buf, "%.3f", a);
        if (first) {
            if (c < 0.0) out += "-";
            first = false;
        } else {
            out += (c < 0.0) ? " - " : " + ";
        }
        out += buf;
        const auto& m = eq.terms.terms[k];
        if (!m.is_constant()) out += "·" + term_name(m);
    }
    return out;
}

namespace {

std::string flag(bool b) { return b ? "true" : "false"; }

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::string expect_kv(std::istream& in, const std::string& key, const std::string& path) {
    std::string line;
    if (!read_line(in, line))
        throw data_error("model file '" + path + "': unexpected end of file, wanted '" + key + "'");
    if (line.rfind(key + "=", 0) != 0)
        throw data_error("model file '" + path + "': expected '" + key + "=...', got '" + line + "'");
    return line.substr(key.size() + 1);
}

} // namespace

void save_model(const SparseModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("save_model: cannot open '" + path + "' for writing");
    char fp[17];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(model.data_fingerprint));
    out << "isindy model 1\n";
    out << "engine=" << model.engine << "\n";
    out << "dims=" << model.ambient_dim << "\n";
    out << "fingerprint=" << fp << "\n";
    out << "S=" << model.config.S << "\n";
    out << "beta=" << fmt_double(model.config.beta) << "\n";
    out << "tau=" << fmt_double(model.config.survivor_tol) << "\n";
    out << "debias=" << flag(model.config.debias) << "\n";
    out << "per_dimension=" << flag(model.config.per_dimension) << "\n";
    out << "standardize=" << flag(model.config.standardize) << "\n";
    for (std::size_t d = 0; d < model.equations.size(); ++d) {
        const auto& eq = model.equations[d];
        out << "dimension=" << (d + 1) << "\n";
        out << "terms=" << eq.terms.size() << "\n";
        out << serialize(eq.terms);
        for (long k = 0; k < eq.coefficients.size(); ++k)
            out << "coef=" << fmt_double(eq.coefficients(k)) << "\n";
    }
    if (!out) throw data_error("save_model: write to '" + path + "' failed");
}

SparseModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("load_model: cannot open '" + path + "'");
    std::string line;
    if (!read_line(in, line) || line != "isindy model 1")
        throw data_error("load_model: '" + path + "' is not a model file");
    SparseModel model;
    model.engine = expect_kv(in, "engine", path);
    model.ambient_dim = static_cast<int>(parse_double(expect_kv(in, "dims", path), "dims"));
    {
        const std::string hex = expect_kv(in, "fingerprint", path);
        try {
            model.data_fingerprint = std::stoull(hex, nullptr, 16);
        } catch (const std::exception&) {
            throw data_error("load_model: bad fingerprint '" + hex + "' in '" + path + "'");
        }
    }
    model.config.S = static_cast<int>(parse_double(expect_kv(in, "S", path), "S"));
    model.config.beta = parse_double(expect_kv(in, "beta", path), "beta");
    model.config.survivor_tol = parse_double(expect_kv(in, "tau", path), "tau");
    model.config.debias = expect_kv(in, "debias", path) == "true";
    model.config.per_dimension = expect_kv(in, "per_dimension", path) == "true";
    model.config.standardize = expect_kv(in, "standardize", path) == "true";
    for (int d = 0; d < model.ambient_dim; ++d) {
        const std::string idx = expect_kv(in, "dimension", path);
        if (idx != std::to_string(d + 1))
            throw data_error("load_model: '" + path + "' dimension blocks out of order");
        const long nterms =
            static_cast<long>(parse_double(expect_kv(in, "terms", path), "terms"));
        if (nterms < 0) throw data_error("load_model: negative term count");
        std::string dict_text;
        for (long i = 0; i < nterms + 1; ++i) {  // "dim=N" header plus terms
            if (!read_line(in, line))
                throw data_error("load_model: '" + path + "' truncated dictionary block");
            dict_text += line;
            dict_text += '\n';
        }
        DimensionModel eq;
        eq.terms = parse_dictionary(dict_text);
        if (eq.terms.ambient_dim != model.ambient_dim)
            throw data_error("load_model: dictionary dimension mismatch in '" + path + "'");
        if (static_cast<long>(eq.terms.size()) != nterms)
            throw data_error("load_model: term count mismatch in '" + path + "'");
        eq.coefficients.resize(nterms);
        for (long k = 0; k < nterms; ++k)
            eq.coefficients(k) = parse_double(expect_kv(in, "coef", path), "coef");
        model.equations.push_back(std::move(eq));
    }
    return model;
}

} // namespace isindy
