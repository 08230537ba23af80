#include <cmath>

#include "affect/common/errors.hpp"
#include "affect/learn/solvers.hpp"

namespace affect::learn {

Eigen::MatrixXd one_hot(std::span<const Label> labels) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), kNumClasses);
    for (std::size_t i = 0; i < labels.size(); ++i) t(static_cast<Eigen::Index>(i), index_of(labels[i])) = 1.0;
    return t;
}

Eigen::VectorXd class_balance_weights(std::span<const Label> labels) {
    ClassCounts counts{};
    for (Label l : labels) ++counts[index_of(l)];
    Eigen::VectorXd w(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) w(static_cast<Eigen::Index>(i)) = 1.0 / counts[index_of(labels[i])];
    if (w.size() > 0) w /= w.mean();
    return w;
}

Eigen::MatrixXd fit_kelm(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& targets, double c_reg,
                         const Eigen::VectorXd* weights) {
    const Eigen::Index n = kernel.rows();
    if (kernel.cols() != n) throw DataError("fit_kelm: kernel matrix must be square");
    if (targets.rows() != n) throw DataError("fit_kelm: target rows do not match kernel size");
    if (!(c_reg > 0.0)) throw ConfigError("fit_kelm: C_reg must be positive");

    Eigen::MatrixXd system = 0.5 * (kernel + kernel.transpose());
    if (weights) {
        if (weights->size() != n) throw DataError("fit_kelm: weight count does not match kernel size");
        if ((weights->array() <= 0.0).any()) throw DataError("fit_kelm: instance weights must be positive");
        system.diagonal() += (weights->cwiseInverse() / c_reg);
    } else {
        system.diagonal().array() += 1.0 / c_reg;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw NumericalError("fit_kelm: regularized kernel system is not positive definite");
    Eigen::MatrixXd beta = ldlt.solve(targets);
    beta += ldlt.solve(targets - system * beta);
    if (!beta.allFinite()) throw NumericalError("fit_kelm: singular regularized kernel system");
    return beta;
}

Eigen::MatrixXd fit_kelm(const Eigen::MatrixXd& kernel, std::span<const Label> labels, double c_reg,
                         const Eigen::VectorXd* weights) {
    return fit_kelm(kernel, one_hot(labels), c_reg, weights);
}

} // namespace affect::learn
