#include "affect/common/errors.hpp"
#include "affect/learn/solvers.hpp"

namespace affect::learn {

RidgeSolution fit_ridge(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& targets, double lambda) {
    const Eigen::Index n = rows.rows();
    const Eigen::Index d = rows.cols();
    if (n == 0) throw DataError("fit_ridge: no training rows");
    if (targets.rows() != n) throw DataError("fit_ridge: target rows do not match");
    if (!(lambda > 0.0)) throw ConfigError("fit_ridge: regularization must be positive");

    const Eigen::RowVectorXd x_mean = rows.colwise().mean();
    const Eigen::RowVectorXd t_mean = targets.colwise().mean();
    const Eigen::MatrixXd xc = rows.rowwise() - x_mean;
    const Eigen::MatrixXd tc = targets.rowwise() - t_mean;

    RidgeSolution sol;
    if (d <= n) {
        Eigen::MatrixXd a = xc.transpose() * xc;
        a.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
        if (ldlt.info() != Eigen::Success) throw NumericalError("fit_ridge: factorization failed");
        sol.weights = ldlt.solve(xc.transpose() * tc);
    } else {
        Eigen::MatrixXd a = xc * xc.transpose();
        a.diagonal().array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
        if (ldlt.info() != Eigen::Success) throw NumericalError("fit_ridge: factorization failed");
        sol.weights = xc.transpose() * ldlt.solve(tc);
    }
    if (!sol.weights.allFinite()) throw NumericalError("fit_ridge: singular system");
    sol.intercept = t_mean - x_mean * sol.weights;
    return sol;
}

} // namespace affect::learn
