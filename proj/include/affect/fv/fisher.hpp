#pragma once

#include <Eigen/Dense>

#include "affect/fv/gmm.hpp"

namespace affect::fv {

struct FisherVector {
    /// Per component k: D mean-gradient entries then D variance-gradient entries.
    Eigen::VectorXd values;
    bool power_normalized = false;
    bool l2_normalized = false;
};

/// Fisher Vector of `rows` (T x D) w.r.t. the means and variances of a diagonal GMM:
///   mean block k:     1/(T sqrt(w_k))    * sum_t g_t(k) (x_t - mu_k) / sigma_k
///   variance block k: 1/(T sqrt(2 w_k))  * sum_t g_t(k) ((x_t - mu_k)^2 / sigma_k^2 - 1)
/// Length 2 * K * D. Throws DataError on empty input or width mismatch.
FisherVector encode_fv(const GmmModel& model, const Eigen::MatrixXd& rows);

/// Optional signed square root, then optional L2 normalization (a zero vector stays zero).
FisherVector normalize_fv(FisherVector v, bool power, bool l2);

} // namespace affect::fv
