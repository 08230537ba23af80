#pragma once

#include <Eigen/Dense>

namespace affect::learn {

/// Per-feature z-scoring with population statistics. Zero-variance features
/// are stored as (mean 0, scale 1) so they pass through unchanged.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& rows);
    /// Identity transform of the given width.
    static Standardizer identity(Eigen::Index width);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
    Eigen::Index width() const { return mean.size(); }
};

} // namespace affect::learn
