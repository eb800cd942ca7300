#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace loadcast {

/// Per-column min/max for the [0, 1] min-max scaling x' = (x - min) / (max - min).
struct ScalerParams {
    std::vector<double> min;
    std::vector<double> max;
    std::vector<std::string> warnings;

    std::size_t columns() const { return min.size(); }
    /// A column whose fitted range is empty. It transforms to 0 and inverts to its min.
    bool degenerate(std::size_t column) const { return max[column] == min[column]; }
};

ScalerParams fit_scaler(const Eigen::MatrixXd& matrix);
/// Values outside the fitted range map outside [0, 1]; nothing is clamped.
Eigen::MatrixXd transform(const Eigen::MatrixXd& matrix, const ScalerParams& params);
Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& matrix, const ScalerParams& params);

} // namespace loadcast
