#include "affect/learn/kernel.hpp"

#include <cmath>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"

namespace affect::learn {

void KernelSpec::validate() const {
    if (kind == KernelKind::Rbf && !(gamma > 0.0)) throw ConfigError("rbf kernel needs gamma > 0");
}

std::string KernelSpec::describe() const {
    return kind == KernelKind::Linear ? "linear" : "rbf(gamma=" + format_real(gamma) + ")";
}

KernelKind parse_kernel_kind(const std::string& name) {
    if (name == "linear") return KernelKind::Linear;
    if (name == "rbf") return KernelKind::Rbf;
    throw ConfigError("unknown kernel '" + name + "' (expected linear or rbf)");
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    spec.validate();
    if (a.cols() != b.cols())
        throw DataError("gram: feature widths differ (" + std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    if (spec.kind == KernelKind::Linear) return a * b.transpose();
    // Direct differences keep k(a, a) == 1 and k(a, b) == k(b, a) exactly.
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = std::exp(-spec.gamma * (a.row(i) - b.row(j)).squaredNorm());
    return k;
}

} // namespace affect::learn
