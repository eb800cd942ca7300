#include "loadcast/scaler.hpp"

#include <fmt/format.h>

#include "loadcast/errors.hpp"

namespace loadcast {

namespace {

void check_columns(const Eigen::MatrixXd& m, const ScalerParams& p) {
    if (static_cast<std::size_t>(m.cols()) != p.columns())
        throw ShapeError(fmt::format("scaler fitted on {} columns, got {}", p.columns(), m.cols()));
}

} // namespace

ScalerParams fit_scaler(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() == 0 || matrix.cols() == 0) throw DataError("fit_scaler: empty matrix");
    ScalerParams p;
    p.min.resize(static_cast<std::size_t>(matrix.cols()));
    p.max.resize(p.min.size());
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
        const auto col = static_cast<std::size_t>(c);
        p.min[col] = matrix.col(c).minCoeff();
        p.max[col] = matrix.col(c).maxCoeff();
        if (p.degenerate(col))
            p.warnings.push_back(fmt::format("column {} is constant ({}); it scales to 0", c, p.min[col]));
    }
    return p;
}

Eigen::MatrixXd transform(const Eigen::MatrixXd& matrix, const ScalerParams& params) {
    check_columns(matrix, params);
    Eigen::MatrixXd out(matrix.rows(), matrix.cols());
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
        const auto col = static_cast<std::size_t>(c);
        if (params.degenerate(col)) {
            out.col(c).setZero();
        } else {
            out.col(c) = (matrix.col(c).array() - params.min[col]) / (params.max[col] - params.min[col]);
        }
    }
    return out;
}

Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& matrix, const ScalerParams& params) {
    check_columns(matrix, params);
    Eigen::MatrixXd out(matrix.rows(), matrix.cols());
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
        const auto col = static_cast<std::size_t>(c);
        out.col(c) = matrix.col(c).array() * (params.max[col] - params.min[col]) + params.min[col];
    }
    return out;
}

} // namespace loadcast
