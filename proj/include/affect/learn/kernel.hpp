#pragma once

#include <string>

#include <Eigen/Dense>

namespace affect::learn {

enum class KernelKind { Linear, Rbf };

struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    double gamma = 1.0;  // rbf only, > 0

    static KernelSpec linear() { return {KernelKind::Linear, 1.0}; }
    static KernelSpec rbf(double gamma) { return {KernelKind::Rbf, gamma}; }
    void validate() const;
    std::string describe() const;
};

KernelKind parse_kernel_kind(const std::string& name);

/// linear: A * B^T; rbf: exp(-gamma * |a - b|^2). Throws DataError on width mismatch.
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

} // namespace affect::learn
