#include <doctest.h>

#include <cmath>

#include "affect/common/diagnostics.hpp"
#include "affect/common/errors.hpp"
#include "affect/fv/fisher.hpp"
#include "affect/fv/gmm.hpp"
#include "affect/fv/model_io.hpp"
#include "affect/fv/pca.hpp"
#include "test_support.hpp"

using namespace affect;
using namespace affect::fv;

namespace {

/// Rows drawn from `k` well-separated spherical clusters.
Eigen::MatrixXd clustered(int n, int d, int k, std::mt19937_64& rng, double spread = 10.0) {
    std::normal_distribution<double> noise(0.0, 1.0);
    const Eigen::MatrixXd centres = testing::random_matrix(k, d, rng) * spread;
    Eigen::MatrixXd x(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) x(i, j) = centres(i % k, j) + noise(rng);
    return x;
}

/// Brute-force Fisher vector straight from the defining sums.
Eigen::VectorXd fv_oracle(const GmmModel& m, const Eigen::MatrixXd& x) {
    const Eigen::Index K = m.num_components(), D = m.dim(), T = x.rows();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * K * D);
    for (Eigen::Index t = 0; t < T; ++t) {
        std::vector<double> logp(K);
        double top = -1e300;
        for (Eigen::Index k = 0; k < K; ++k) {
            double lp = std::log(m.weights(k));
            for (Eigen::Index d = 0; d < D; ++d) {
                const double v = m.variances(k, d), z = x(t, d) - m.means(k, d);
                lp += -0.5 * (std::log(2 * M_PI * v) + z * z / v);
            }
            logp[k] = lp;
            top = std::max(top, lp);
        }
        double norm = 0.0;
        for (double lp : logp) norm += std::exp(lp - top);
        for (Eigen::Index k = 0; k < K; ++k) {
            const double g = std::exp(logp[k] - top) / norm;
            for (Eigen::Index d = 0; d < D; ++d) {
                const double s = std::sqrt(m.variances(k, d)), z = (x(t, d) - m.means(k, d)) / s;
                out(2 * k * D + d) += g * z / (T * std::sqrt(m.weights(k)));
                out(2 * k * D + D + d) += g * (z * z - 1) / (T * std::sqrt(2 * m.weights(k)));
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("PCA basis is orthonormal and reconstructs exactly at full rank") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd x = testing::random_matrix(200, 6, rng) * testing::random_matrix(6, 6, rng);
    const PcaModel full = fit_pca(x, ComponentCount{6});
    CHECK((full.basis.transpose() * full.basis - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((reconstruct_pca(full, apply_pca(full, x)) - x).cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index i = 1; i < full.eigenvalues.size(); ++i) CHECK(full.eigenvalues(i) <= full.eigenvalues(i - 1));
    CHECK(full.explained_ratio(5) == doctest::Approx(1.0));

    // Eigenvalues are proportional to the variances of the projected columns.
    const Eigen::MatrixXd proj = apply_pca(full, x);
    const Eigen::RowVectorXd var = (proj.rowwise() - proj.colwise().mean()).colwise().squaredNorm();
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(var(i) / var(0) == doctest::Approx(full.eigenvalues(i) / full.eigenvalues(0)));
}

TEST_CASE("PCA keeps the fewest components reaching the variance fraction") {
    std::mt19937_64 rng(2);
    Eigen::MatrixXd x = testing::random_matrix(500, 4, rng);
    x.col(0) *= 10.0;
    x.col(1) *= 3.0;
    x.col(2) *= 0.01;
    x.col(3) *= 0.01;
    const PcaModel m = fit_pca(x, VarianceFraction{0.99});
    CHECK(m.output_dim() == 2);
    CHECK(m.explained_ratio(1) >= 0.99);
    CHECK(m.explained_ratio(0) < 0.99);
    // Sign convention: the largest-magnitude entry of each column is positive.
    for (Eigen::Index c = 0; c < m.basis.cols(); ++c) {
        Eigen::Index r = 0;
        m.basis.col(c).cwiseAbs().maxCoeff(&r);
        CHECK(m.basis(r, c) > 0);
    }
}

TEST_CASE("PCA with fewer observations than features uses the Gram path") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd x = testing::random_matrix(8, 30, rng);
    Diagnostics diag;
    const PcaModel m = fit_pca(x, ComponentCount{20}, &diag);
    CHECK(m.output_dim() == 7);
    CHECK(diag.contains("clamp"));
    CHECK((m.basis.transpose() * m.basis - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((reconstruct_pca(m, apply_pca(m, x)) - x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(apply_pca(m, Eigen::MatrixXd::Zero(2, 29)), DataError);
}

TEST_CASE("GMM log-likelihood never decreases and clusters are recovered") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd x = clustered(600, 3, 3, rng);
    GmmOptions opt;
    opt.components = 3;
    opt.seed = 9;
    const GmmModel m = fit_gmm(x, opt);
    REQUIRE(m.log_likelihood_history.size() >= 2);
    for (std::size_t i = 1; i < m.log_likelihood_history.size(); ++i)
        CHECK(m.log_likelihood_history[i] >= m.log_likelihood_history[i - 1] - 1e-8);
    CHECK(m.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index k = 0; k < 3; ++k) CHECK(m.weights(k) == doctest::Approx(1.0 / 3).epsilon(0.02));
    CHECK(m.train_log_likelihood == doctest::Approx(log_likelihood(m, x)).epsilon(1e-10));
    const Eigen::MatrixXd post = posteriors(m, x);
    CHECK((post.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("GMM is deterministic per seed and independent of the worker count") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd x = clustered(3000, 4, 4, rng, 3.0);
    GmmOptions opt;
    opt.components = 4;
    opt.seed = 3;
    ::setenv("AFFECT_WORKERS", "1", 1);
    const GmmModel a = fit_gmm(x, opt);
    ::setenv("AFFECT_WORKERS", "4", 1);
    const GmmModel b = fit_gmm(x, opt);
    ::unsetenv("AFFECT_WORKERS");
    CHECK(a.means == b.means);
    CHECK(a.variances == b.variances);
    CHECK(a.weights == b.weights);
}

TEST_CASE("GMM input checks") {
    GmmOptions opt;
    opt.components = 5;
    CHECK_THROWS_AS(fit_gmm(Eigen::MatrixXd::Zero(3, 2), opt), DataError);
    // A constant dimension keeps a positive variance floor.
    std::mt19937_64 rng(6);
    Eigen::MatrixXd x = testing::random_matrix(100, 2, rng);
    x.col(1).setConstant(4.0);
    opt.components = 2;
    const GmmModel m = fit_gmm(x, opt);
    CHECK(m.variances.minCoeff() > 0.0);
    CHECK(m.variances.allFinite());
}

TEST_CASE("Fisher vector matches the brute-force definition") {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd x = clustered(300, 3, 2, rng, 4.0);
    GmmOptions opt;
    opt.components = 2;
    const GmmModel m = fit_gmm(x, opt);
    const Eigen::MatrixXd probe = testing::random_matrix(37, 3, rng) * 3.0;
    const FisherVector v = encode_fv(m, probe);
    CHECK(v.values.size() == 2 * 2 * 3);
    CHECK((v.values - fv_oracle(m, probe)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(encode_fv(m, Eigen::MatrixXd::Zero(0, 3)), DataError);
    CHECK_THROWS_AS(encode_fv(m, Eigen::MatrixXd::Zero(4, 2)), DataError);
}

TEST_CASE("Fisher vector normalization") {
    FisherVector v;
    v.values = Eigen::VectorXd(3);
    v.values << 4.0, -9.0, 0.0;
    const FisherVector p = normalize_fv(v, true, false);
    CHECK(p.values(0) == 2.0);
    CHECK(p.values(1) == -3.0);
    const FisherVector pl = normalize_fv(v, true, true);
    CHECK(pl.values.norm() == doctest::Approx(1.0));
    CHECK(pl.power_normalized);
    CHECK(pl.l2_normalized);
    FisherVector zero;
    zero.values = Eigen::VectorXd::Zero(4);
    CHECK(normalize_fv(zero, true, true).values.isZero());
}

TEST_CASE("model files round trip") {
    const auto dir = testing::scratch_dir("fv_io");
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd x = clustered(200, 3, 2, rng);
    const PcaModel p = fit_pca(x, VarianceFraction{0.9});
    GmmOptions opt;
    opt.components = 2;
    const GmmModel g = fit_gmm(x, opt);
    save_pca(dir / "p.afp", p);
    save_gmm(dir / "g.afp", g);
    const PcaModel p2 = load_pca(dir / "p.afp");
    const GmmModel g2 = load_gmm(dir / "g.afp");
    CHECK(p2.basis == p.basis);
    CHECK(p2.mean == p.mean);
    CHECK(p2.eigenvalues == p.eigenvalues);
    CHECK(g2.means == g.means);
    CHECK(g2.variances == g.variances);
    CHECK(g2.weights == g.weights);
    CHECK(encode_fv(g2, x).values == encode_fv(g, x).values);
    CHECK_THROWS_AS(load_gmm(dir / "p.afp"), DataError);
}
