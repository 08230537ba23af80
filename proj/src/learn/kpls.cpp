#include <cmath>

#include "affect/common/errors.hpp"
#include "affect/learn/solvers.hpp"

namespace affect::learn {

KplsSolution fit_kpls(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& targets, int components,
                      const Eigen::VectorXd* weights) {
    const Eigen::Index n = kernel.rows();
    if (kernel.cols() != n) throw DataError("fit_kpls: kernel matrix must be square");
    if (targets.rows() != n) throw DataError("fit_kpls: target rows do not match kernel size");
    if (components < 1 || components >= n)
        throw ConfigError("fit_kpls: component count must satisfy 1 <= L < n (L=" + std::to_string(components) +
                          ", n=" + std::to_string(n) + ")");

    Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    if (weights) {
        if (weights->size() != n) throw DataError("fit_kpls: weight count does not match kernel size");
        if ((weights->array() <= 0.0).any()) throw DataError("fit_kpls: instance weights must be positive");
        w = *weights;
    }

    KplsSolution sol;
    sol.center_weights = w / w.sum();
    const Eigen::VectorXd& p = sol.center_weights;
    sol.kernel_center = kernel * p;
    sol.kernel_mean = p.dot(sol.kernel_center);
    sol.target_mean = p.transpose() * targets;

    const Eigen::VectorXd root = w.cwiseSqrt();
    Eigen::MatrixXd centered = kernel;
    centered.colwise() -= sol.kernel_center;
    centered.rowwise() -= sol.kernel_center.transpose();
    centered.array() += sol.kernel_mean;
    const Eigen::MatrixXd ks = root.asDiagonal() * centered * root.asDiagonal();
    const Eigen::MatrixXd ys = root.asDiagonal() * (targets.rowwise() - sol.target_mean);

    Eigen::MatrixXd kd = ks;
    Eigen::MatrixXd yd = ys;
    Eigen::MatrixXd t_scores(n, components), u_scores(n, components);
    const double y_scale = std::max(ys.norm(), 1e-300);
    int extracted = 0;
    for (int a = 0; a < components; ++a) {
        if (yd.norm() <= 1e-12 * y_scale) break;
        // The NIPALS fixed point t ~ K Y Y^T t is reached directly: with c the
        // leading eigenvector of Y^T K Y, u = Y c and t = K u.
        const Eigen::MatrixXd small = yd.transpose() * kd * yd;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (small + small.transpose()));
        if (eig.info() != Eigen::Success)
            throw NumericalError("fit_kpls: latent component " + std::to_string(a + 1) + " failed to converge");
        Eigen::VectorXd c = eig.eigenvectors().col(eig.eigenvectors().cols() - 1);
        Eigen::Index arg = 0;
        c.cwiseAbs().maxCoeff(&arg);
        if (c(arg) < 0.0) c = -c;
        Eigen::VectorXd u = yd * c;
        if (u.norm() <= 1e-300) break;
        u.normalize();
        Eigen::VectorXd t = kd * u;
        const double tn = t.norm();
        if (!(tn > 1e-12 * std::max(ks.norm(), 1e-300))) break;
        t /= tn;

        t_scores.col(a) = t;
        u_scores.col(a) = u;
        ++extracted;
        // Deflate: K <- (I - t t^T) K (I - t t^T), Y <- Y - t t^T Y.
        const Eigen::VectorXd kt = kd * t;
        const double tkt = t.dot(kt);
        kd -= t * kt.transpose() + kt * t.transpose();
        kd += tkt * (t * t.transpose());
        yd -= t * (t.transpose() * yd);
    }
    if (extracted == 0) throw NumericalError("fit_kpls: no latent component could be extracted");

    const Eigen::MatrixXd T = t_scores.leftCols(extracted);
    const Eigen::MatrixXd U = u_scores.leftCols(extracted);
    const Eigen::MatrixXd tku = T.transpose() * ks * U;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(tku);
    if (!lu.isInvertible()) throw NumericalError("fit_kpls: singular score cross-product");
    const Eigen::MatrixXd b = U * lu.solve(T.transpose() * ys);
    sol.dual = root.asDiagonal() * b;
    sol.components = extracted;
    return sol;
}

Eigen::MatrixXd kpls_predict(const KplsSolution& model, const Eigen::MatrixXd& test_kernel) {
    if (test_kernel.cols() != model.dual.rows()) throw DataError("kpls_predict: kernel block width mismatch");
    Eigen::MatrixXd kc = test_kernel;
    const Eigen::VectorXd row_center = test_kernel * model.center_weights;
    kc.colwise() -= row_center;
    kc.rowwise() -= model.kernel_center.transpose();
    kc.array() += model.kernel_mean;
    return (kc * model.dual).rowwise() + model.target_mean;
}

} // namespace affect::learn
