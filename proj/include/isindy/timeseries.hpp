#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace isindy {

// Multivariate series, one row per time step, one column per state dimension.
struct TimeSeries {
    Eigen::MatrixXd samples;          // T x N
    std::optional<double> dt;         // sampling interval, when known
    std::vector<std::string> labels;  // per-column names, empty when absent

    long rows() const { return samples.rows(); }
    long cols() const { return samples.cols(); }
};

} // namespace isindy
