#pragma once

#include <variant>

#include <Eigen/Dense>

#include "affect/common/diagnostics.hpp"

namespace affect::fv {

/// Retain the smallest number of components whose cumulative explained
/// variance reaches `fraction` (e.g. 0.999).
struct VarianceFraction {
    double fraction = 0.999;
};

/// Retain exactly `count` components.
struct ComponentCount {
    int count = 0;
};

using PcaTarget = std::variant<VarianceFraction, ComponentCount>;

/// Rotation onto the leading eigenvectors of the sample covariance. No whitening.
struct PcaModel {
    Eigen::VectorXd mean;             // D
    Eigen::MatrixXd basis;            // D x K, orthonormal columns
    Eigen::VectorXd eigenvalues;      // K, descending
    Eigen::VectorXd explained_ratio;  // K, cumulative fraction of total variance

    Eigen::Index input_dim() const { return basis.rows(); }
    Eigen::Index output_dim() const { return basis.cols(); }
};

/// Fits PCA on the rows of `data` (observations x features).
///
/// Eigenvalues below 1e-12 * trace are dropped as numerically zero. When there
/// are fewer observations than features the decomposition runs on the n x n
/// Gram matrix instead of the D x D covariance. A fixed count larger than the
/// number of non-degenerate directions is clamped (warning).
/// Basis signs are fixed so the largest-magnitude entry of each column is positive.
PcaModel fit_pca(const Eigen::MatrixXd& data, const PcaTarget& target, Diagnostics* diag = nullptr);

/// (rows - mean) * basis. Throws DataError on width mismatch.
Eigen::MatrixXd apply_pca(const PcaModel& model, const Eigen::MatrixXd& rows);

/// projected * basis^T + mean.
Eigen::MatrixXd reconstruct_pca(const PcaModel& model, const Eigen::MatrixXd& projected);

} // namespace affect::fv
