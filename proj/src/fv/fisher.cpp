#include "affect/fv/fisher.hpp"

#include <cmath>

#include "affect/common/errors.hpp"

namespace affect::fv {

FisherVector encode_fv(const GmmModel& model, const Eigen::MatrixXd& rows) {
    if (rows.rows() == 0) throw DataError("encode_fv: no frames to encode");
    if (rows.cols() != model.dim())
        throw DataError("encode_fv: frame width " + std::to_string(rows.cols()) + " does not match GMM dimension " +
                        std::to_string(model.dim()));
    const Eigen::Index K = model.num_components();
    const Eigen::Index D = model.dim();
    const double T = static_cast<double>(rows.rows());
    const Eigen::MatrixXd gamma = posteriors(model, rows);

    FisherVector fv;
    fv.values.resize(2 * K * D);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Eigen::RowVectorXd sigma = model.variances.row(k).cwiseSqrt();
        const Eigen::MatrixXd z = (rows.rowwise() - model.means.row(k)).array().rowwise() / sigma.array();
        const Eigen::VectorXd g = gamma.col(k);
        const Eigen::RowVectorXd s1 = g.transpose() * z;
        const Eigen::RowVectorXd s2 = g.transpose() * (z.array().square() - 1.0).matrix();
        const double w = model.weights(k);
        fv.values.segment(2 * k * D, D) = s1.transpose() / (T * std::sqrt(w));
        fv.values.segment(2 * k * D + D, D) = s2.transpose() / (T * std::sqrt(2.0 * w));
    }
    return fv;
}

FisherVector normalize_fv(FisherVector v, bool power, bool l2) {
    if (power) {
        v.values = v.values.unaryExpr([](double x) { return std::copysign(std::sqrt(std::abs(x)), x); });
        v.power_normalized = true;
    }
    if (l2) {
        const double norm = v.values.norm();
        if (norm > 0.0) v.values /= norm;
        v.l2_normalized = true;
    }
    return v;
}

} // namespace affect::fv
