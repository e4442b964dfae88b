#pragma once

#include "isindy/engine.hpp"
#include "isindy/timeseries.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isindy {

// Shortest decimal form that round-trips the exact double (to_chars).
std::string fmt_double(double v);
// Locale-independent strict parse of a full token (from_chars).
double parse_double(const std::string& token, const std::string& context);

std::uint64_t fnv1a64(const void* bytes, std::size_t len);
// Order-sensitive hash of the raw sample values; used to fingerprint inputs.
std::uint64_t fingerprint(const TimeSeries& ts);

// CSV, comma-separated, LF line endings on write, CRLF tolerated on read.
// A non-numeric first row is taken as a header of column labels.
TimeSeries read_csv(const std::string& path);
void write_csv(const TimeSeries& ts, const std::string& path);

// One flat key = value file drives simulate/fit/bench runs.
struct RunConfig {
    std::string engine = "iterative";       // iterative | conventional
    std::string data_path;                  // CSV input; empty when generated
    std::string generator;                  // lorenz | logistic | surrogate
    long steps = 1'000;
    double dt = 0.01;
    double logistic_r = 3.9;
    double logistic_x0 = 0.5;
    int dim = 6;                            // surrogate width
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    FitConfig fit;

    std::string sweep;                      // "", beta | depth | dimension
    std::vector<double> beta_grid;
    std::vector<int> s_grid;
    std::vector<int> n_grid;
    int repetitions = 1;

    std::string out_model;
    std::string out_report;
    std::string out_results;
    std::string format = "csv";             // csv | jsonl
};

// Parser accepts `key = value`, blank lines, and `#` comments; list values
// use brackets: grid = [0.001, 0.01]. Unknown keys and ill-typed values are
// errors that name the key.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

} // namespace isindy
