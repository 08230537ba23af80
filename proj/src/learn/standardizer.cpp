#include "affect/learn/standardizer.hpp"

#include <cmath>

#include "affect/common/errors.hpp"

namespace affect::learn {

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
    if (rows.rows() == 0 || rows.cols() == 0) throw DataError("standardize: empty input");
    Standardizer s;
    s.mean = rows.colwise().mean();
    s.scale = ((rows.rowwise() - s.mean).array().square().colwise().mean()).sqrt().matrix();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
        if (!(s.scale(j) > 1e-12 * std::max(1.0, std::abs(s.mean(j))))) {
            s.mean(j) = 0.0;
            s.scale(j) = 1.0;
        }
    }
    return s;
}

Standardizer Standardizer::identity(Eigen::Index width) {
    return {Eigen::RowVectorXd::Zero(width), Eigen::RowVectorXd::Ones(width)};
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
    if (rows.rows() == 0) throw DataError("standardize: empty input");
    if (rows.cols() != width())
        throw DataError("standardize: width " + std::to_string(rows.cols()) + " does not match fitted width " +
                        std::to_string(width()));
    return ((rows.rowwise() - mean).array().rowwise() / scale.array()).matrix();
}

} // namespace affect::learn
