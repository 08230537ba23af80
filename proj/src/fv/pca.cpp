#include "affect/fv/pca.hpp"

#include <cmath>

#include "affect/common/errors.hpp"

namespace affect::fv {

PcaModel fit_pca(const Eigen::MatrixXd& data, const PcaTarget& target, Diagnostics* diag) {
    const Eigen::Index n = data.rows();
    const Eigen::Index D = data.cols();
    if (n < 2 || D < 1) throw DataError("fit_pca: need at least two observations");

    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
    const double denom = static_cast<double>(n - 1);
    const double trace = centered.squaredNorm() / denom;
    if (!(trace > 0.0)) throw DataError("fit_pca: data has zero variance");

    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    if (n - 1 >= D) {
        const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success) throw NumericalError("fit_pca: eigen-decomposition failed");
        values = eig.eigenvalues().reverse();
        vectors = eig.eigenvectors().rowwise().reverse();
    } else {
        const Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success) throw NumericalError("fit_pca: eigen-decomposition failed");
        values = eig.eigenvalues().reverse();
        const Eigen::MatrixXd u = eig.eigenvectors().rowwise().reverse();
        vectors.resize(D, values.size());
        for (Eigen::Index k = 0; k < values.size(); ++k) {
            if (values(k) > 0.0)
                vectors.col(k) = centered.transpose() * u.col(k) / std::sqrt(values(k) * denom);
            else
                vectors.col(k).setZero();
        }
    }

    Eigen::Index usable = 0;
    while (usable < values.size() && values(usable) >= 1e-12 * trace) ++usable;

    Eigen::VectorXd cumulative(usable);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < usable; ++k) {
        acc += values(k);
        cumulative(k) = std::min(acc / trace, 1.0);
    }

    Eigen::Index keep = usable;
    if (const auto* vf = std::get_if<VarianceFraction>(&target)) {
        if (!(vf->fraction > 0.0 && vf->fraction <= 1.0))
            throw ConfigError("fit_pca: variance fraction must lie in (0, 1]");
        keep = 0;
        while (keep < usable && cumulative(keep) < vf->fraction - 1e-12) ++keep;
        keep = std::min(keep + 1, usable);
    } else {
        const int k = std::get<ComponentCount>(target).count;
        if (k < 1) throw ConfigError("fit_pca: component count must be positive");
        if (k > usable)
            warn(diag, "fit_pca: requested " + std::to_string(k) + " components but only " + std::to_string(usable) +
                           " non-degenerate directions exist; clamping");
        keep = std::min<Eigen::Index>(k, usable);
    }

    model.basis = vectors.leftCols(keep);
    for (Eigen::Index k = 0; k < keep; ++k) {
        Eigen::Index arg = 0;
        model.basis.col(k).cwiseAbs().maxCoeff(&arg);
        if (model.basis(arg, k) < 0.0) model.basis.col(k) *= -1.0;
    }
    model.eigenvalues = values.head(keep);
    model.explained_ratio = cumulative.head(keep);
    return model;
}

Eigen::MatrixXd apply_pca(const PcaModel& model, const Eigen::MatrixXd& rows) {
    if (rows.cols() != model.input_dim())
        throw DataError("apply_pca: row width " + std::to_string(rows.cols()) + " does not match model width " +
                        std::to_string(model.input_dim()));
    return (rows.rowwise() - model.mean.transpose()) * model.basis;
}

Eigen::MatrixXd reconstruct_pca(const PcaModel& model, const Eigen::MatrixXd& projected) {
    if (projected.cols() != model.output_dim()) throw DataError("reconstruct_pca: width mismatch");
    return (projected * model.basis.transpose()).rowwise() + model.mean.transpose();
}

} // namespace affect::fv
