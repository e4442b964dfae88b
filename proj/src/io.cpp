#include "isindy/io.hpp"
#include "isindy/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace isindy {

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw numeric_error("fmt_double: conversion failed");
    return std::string(buf, p);
}

namespace {

bool try_parse_double(std::string_view token, double& out) {
    const char* b = token.data();
    const char* e = token.data() + token.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

double parse_double(const std::string& token, const std::string& context) {
    double v = 0.0;
    std::string_view t = trim(token);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (!try_parse_double(t, v))
        throw data_error(context + ": cannot parse '" + std::string(t) + "' as a number");
    return v;
}

std::uint64_t fnv1a64(const void* bytes, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t fingerprint(const TimeSeries& ts) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    const long T = ts.rows(), N = ts.cols();
    h ^= static_cast<std::uint64_t>(T) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(N);
    for (long t = 0; t < T; ++t)
        for (long n = 0; n < N; ++n) {
            const double v = ts.samples(t, n);
            h ^= fnv1a64(&v, sizeof v);
            h *= 0x100000001B3ull;
        }
    return h;
}

TimeSeries read_csv(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start < text.size()) {
            std::size_t pos = text.find('\n', start);
            if (pos == std::string::npos) pos = text.size();
            std::string_view line(text.data() + start, pos - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!line.empty()) lines.push_back(line);
            start = pos + 1;
        }
    }
    if (lines.empty()) throw data_error("read_csv: '" + path + "' has no rows");

    auto fields_of = [](std::string_view line) { return split(line, ','); };

    // Header detection: a first row with any non-numeric field is a header.
    std::vector<std::string> first = fields_of(lines[0]);
    bool header = false;
    for (const auto& f : first) {
        double v;
        if (!try_parse_double(trim(f), v)) {
            header = true;
            break;
        }
    }
    TimeSeries ts;
    std::size_t data_start = 0;
    if (header) {
        for (auto& f : first) ts.labels.emplace_back(trim(f));
        data_start = 1;
    }
    if (data_start >= lines.size())
        throw data_error("read_csv: '" + path + "' has a header but no data rows");

    const std::size_t ncols = fields_of(lines[data_start]).size();
    if (header && ts.labels.size() != ncols)
        throw data_error("read_csv: '" + path + "' header has " + std::to_string(ts.labels.size()) +
                         " fields but row 1 has " + std::to_string(ncols));
    const std::size_t nrows = lines.size() - data_start;
    ts.samples.resize(static_cast<long>(nrows), static_cast<long>(ncols));
    for (std::size_t r = 0; r < nrows; ++r) {
        const std::vector<std::string> fields = fields_of(lines[data_start + r]);
        if (fields.size() != ncols)
            throw data_error("read_csv: '" + path + "' row " + std::to_string(r + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(ncols));
        for (std::size_t c = 0; c < ncols; ++c) {
            double v;
            if (!try_parse_double(trim(fields[c]), v))
                throw data_error("read_csv: '" + path + "' row " + std::to_string(r + 1) +
                                 " column " + std::to_string(c + 1) + ": cannot parse '" +
                                 fields[c] + "'");
            if (!std::isfinite(v))
                throw data_error("read_csv: '" + path + "' row " + std::to_string(r + 1) +
                                 " column " + std::to_string(c + 1) + ": non-finite value");
            ts.samples(static_cast<long>(r), static_cast<long>(c)) = v;
        }
    }
    return ts;
}

void write_csv(const TimeSeries& ts, const std::string& path) {
    if (ts.rows() < 1 || ts.cols() < 1)
        throw data_error("write_csv: refusing to write an empty series");
    if (!ts.labels.empty() && ts.labels.size() != static_cast<std::size_t>(ts.cols()))
        throw data_error("write_csv: " + std::to_string(ts.labels.size()) + " labels for " +
                         std::to_string(ts.cols()) + " columns");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("write_csv: cannot open '" + path + "' for writing");
    if (!ts.labels.empty()) {
        for (std::size_t i = 0; i < ts.labels.size(); ++i) {
            if (i) out << ',';
            out << ts.labels[i];
        }
        out << '\n';
    }
    for (long t = 0; t < ts.rows(); ++t) {
        for (long c = 0; c < ts.cols(); ++c) {
            if (c) out << ',';
            out << fmt_double(ts.samples(t, c));
        }
        out << '\n';
    }
    if (!out) throw data_error("write_csv: write to '" + path + "' failed");
}

namespace {

std::vector<std::string> parse_list(std::string_view value, const std::string& key) {
    std::string_view v = trim(value);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw data_error("config key '" + key + "': expected a bracketed list, got '" +
                         std::string(v) + "'");
    v = v.substr(1, v.size() - 2);
    std::vector<std::string> items;
    if (trim(v).empty()) return items;
    for (const auto& piece : split(v, ','))
        items.emplace_back(trim(piece));
    return items;
}

bool parse_bool(std::string_view v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw data_error("config key '" + key + "': expected a boolean, got '" + std::string(v) + "'");
}

long parse_int(std::string_view v, const std::string& key) {
    long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw data_error("config key '" + key + "': expected an integer, got '" + std::string(v) + "'");
    return out;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    long lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line(raw);
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw data_error(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty())
            throw data_error(origin + ":" + std::to_string(lineno) + ": empty key");

        if (key == "engine") {
            if (value != "iterative" && value != "conventional")
                throw data_error("config key 'engine': expected iterative or conventional, got '" +
                                 value + "'");
            cfg.engine = value;
        } else if (key == "data") {
            cfg.data_path = value;
        } else if (key == "generator") {
            if (value != "lorenz" && value != "logistic" && value != "surrogate")
                throw data_error("config key 'generator': expected lorenz, logistic or surrogate, got '" +
                                 value + "'");
            cfg.generator = value;
        } else if (key == "steps") {
            cfg.steps = parse_int(value, key);
        } else if (key == "dt") {
            cfg.dt = parse_double(value, "config key 'dt'");
        } else if (key == "r") {
            cfg.logistic_r = parse_double(value, "config key 'r'");
        } else if (key == "x0") {
            cfg.logistic_x0 = parse_double(value, "config key 'x0'");
        } else if (key == "N" || key == "dim") {
            cfg.dim = static_cast<int>(parse_int(value, key));
        } else if (key == "snr_db") {
            cfg.snr_db = parse_double(value, "config key 'snr_db'");
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "S") {
            cfg.fit.S = static_cast<int>(parse_int(value, key));
        } else if (key == "beta") {
            cfg.fit.beta = parse_double(value, "config key 'beta'");
        } else if (key == "tau") {
            cfg.fit.survivor_tol = parse_double(value, "config key 'tau'");
        } else if (key == "debias") {
            cfg.fit.debias = parse_bool(value, key);
        } else if (key == "per_dimension") {
            cfg.fit.per_dimension = parse_bool(value, key);
        } else if (key == "standardize") {
            cfg.fit.standardize = parse_bool(value, key);
        } else if (key == "solver_tol") {
            cfg.fit.solver_tol = parse_double(value, "config key 'solver_tol'");
        } else if (key == "max_sweeps") {
            cfg.fit.max_sweeps = static_cast<int>(parse_int(value, key));
        } else if (key == "dict_cap") {
            const long v = parse_int(value, key);
            if (v < 1) throw data_error("config key 'dict_cap': must be >= 1");
            cfg.fit.dict_cap = static_cast<std::size_t>(v);
        } else if (key == "sweep") {
            if (value != "beta" && value != "depth" && value != "dimension")
                throw data_error("config key 'sweep': expected beta, depth or dimension, got '" +
                                 value + "'");
            cfg.sweep = value;
        } else if (key == "beta_grid") {
            cfg.beta_grid.clear();
            for (const auto& item : parse_list(value, key))
                cfg.beta_grid.push_back(parse_double(item, "config key 'beta_grid'"));
        } else if (key == "S_grid") {
            cfg.s_grid.clear();
            for (const auto& item : parse_list(value, key))
                cfg.s_grid.push_back(static_cast<int>(parse_int(item, key)));
        } else if (key == "N_grid") {
            cfg.n_grid.clear();
            for (const auto& item : parse_list(value, key))
                cfg.n_grid.push_back(static_cast<int>(parse_int(item, key)));
        } else if (key == "repetitions") {
            const long v = parse_int(value, key);
            if (v < 1) throw data_error("config key 'repetitions': must be >= 1");
            cfg.repetitions = static_cast<int>(v);
        } else if (key == "out_model") {
            cfg.out_model = value;
        } else if (key == "out_report") {
            cfg.out_report = value;
        } else if (key == "out_results") {
            cfg.out_results = value;
        } else if (key == "format") {
            if (value != "csv" && value != "jsonl")
                throw data_error("config key 'format': expected csv or jsonl, got '" + value + "'");
            cfg.format = value;
        } else {
            throw data_error(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return parse_config(read_file(path), path);
}

} // namespace isindy
