#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace affect::fv {

struct GmmOptions {
    int components = 16;
    std::uint64_t seed = 0;
    int max_iterations = 200;
    /// Stop when (LL_t - LL_{t-1}) / |LL_{t-1}| drops below this.
    double relative_tolerance = 1e-6;
    /// Per-dimension variance floor as a fraction of the global variance.
    double variance_floor_ratio = 1e-4;
};

/// Diagonal-covariance Gaussian mixture.
struct GmmModel {
    Eigen::VectorXd weights;    // K, on the simplex
    Eigen::MatrixXd means;      // K x D
    Eigen::MatrixXd variances;  // K x D, >= floor
    /// Total training log-likelihood of the final parameters.
    double train_log_likelihood = 0.0;
    /// Total training log-likelihood evaluated at the start of every EM
    /// iteration plus the final parameters; non-decreasing.
    std::vector<double> log_likelihood_history;
    int restarts = 0;

    Eigen::Index num_components() const { return weights.size(); }
    Eigen::Index dim() const { return means.cols(); }
};

/// EM from seeded k-means++ initialization. Stops on relative gain below the
/// tolerance or after max_iterations. A collapsed component (weight < 1e-8)
/// triggers one full re-initialization with a derived seed; a second collapse
/// throws NumericalError. Throws DataError when K exceeds the number of rows.
///
/// The E-step runs over fixed row blocks whose statistics are summed in block
/// order, so results do not depend on the worker count.
GmmModel fit_gmm(const Eigen::MatrixXd& rows, const GmmOptions& options);

/// Per-row component log densities plus log weights (N x K).
Eigen::MatrixXd weighted_log_densities(const GmmModel& model, const Eigen::MatrixXd& rows);

/// Responsibilities (N x K), rows summing to one.
Eigen::MatrixXd posteriors(const GmmModel& model, const Eigen::MatrixXd& rows);

/// Total log-likelihood of `rows` under the model.
double log_likelihood(const GmmModel& model, const Eigen::MatrixXd& rows);

} // namespace affect::fv
