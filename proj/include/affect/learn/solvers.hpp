#pragma once

#include <span>

#include <Eigen/Dense>

#include "affect/common/label.hpp"

namespace affect::learn {

/// n x 3 one-hot targets (1 for the own class, 0 otherwise).
Eigen::MatrixXd one_hot(std::span<const Label> labels);

/// Per-instance weights 1 / n_class(i), rescaled to mean 1.
Eigen::VectorXd class_balance_weights(std::span<const Label> labels);

/// Kernel ELM output weights.
///   unweighted: beta = (I/C + K)^-1 T
///   weighted:   beta = (I/C + W K)^-1 W T, solved as the equivalent symmetric
///               positive-definite system (W^-1/C + K) beta = T.
/// Uses an LDL^T factorization plus one step of iterative refinement.
/// Throws NumericalError if the regularized system is singular.
Eigen::MatrixXd fit_kelm(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& targets, double c_reg,
                         const Eigen::VectorXd* weights = nullptr);

/// Convenience overload on labels (one-hot targets).
Eigen::MatrixXd fit_kelm(const Eigen::MatrixXd& kernel, std::span<const Label> labels, double c_reg,
                         const Eigen::VectorXd* weights = nullptr);

/// Dual kernel PLS solution. Predictions for a test kernel block K* (m x n):
///   Kc* = K* - (K* p) 1^T - 1 (K p)^T + (p^T K p)
///   Y*  = Kc* * dual + target_mean
struct KplsSolution {
    Eigen::MatrixXd dual;            // n x 3
    Eigen::VectorXd center_weights;  // p (sums to one)
    Eigen::VectorXd kernel_center;   // K p
    double kernel_mean = 0.0;        // p^T K p
    Eigen::RowVectorXd target_mean;  // p^T Y
    int components = 0;              // latent components actually extracted
};

/// Kernel PLS with deflation on the (weighted-)centred kernel. With instance
/// weights w, centring uses p = w / sum(w) and rows are scaled by sqrt(w).
/// Extraction stops early once the residual targets vanish.
/// Throws ConfigError unless 1 <= components < n.
KplsSolution fit_kpls(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& targets, int components,
                      const Eigen::VectorXd* weights = nullptr);

Eigen::MatrixXd kpls_predict(const KplsSolution& model, const Eigen::MatrixXd& test_kernel);

/// Ridge one-vs-rest on centred data: W = (Xc^T Xc + lambda I)^-1 Xc^T Tc,
/// intercept = mean(T) - mean(X) W. Uses the dual form when D > n.
struct RidgeSolution {
    Eigen::MatrixXd weights;       // D x 3
    Eigen::RowVectorXd intercept;  // 3
};

RidgeSolution fit_ridge(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& targets, double lambda);

} // namespace affect::learn
