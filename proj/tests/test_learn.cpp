#include <doctest.h>

#include <cmath>

#include "affect/common/errors.hpp"
#include "affect/learn/kernel.hpp"
#include "affect/learn/model.hpp"
#include "affect/learn/prediction.hpp"
#include "affect/learn/solvers.hpp"
#include "affect/learn/standardizer.hpp"
#include "test_support.hpp"

using namespace affect;
using namespace affect::learn;

namespace {

Eigen::MatrixXd random_psd(Eigen::Index n, std::mt19937_64& rng) {
    const Eigen::MatrixXd a = testing::random_matrix(n, n / 2 + 1, rng);
    return a * a.transpose();
}

/// Three Gaussian blobs in `d` dimensions, one per class.
void blobs(int per_class, int d, std::mt19937_64& rng, Eigen::MatrixXd& x, std::vector<Label>& y, double gap = 4.0) {
    std::normal_distribution<double> n(0.0, 1.0);
    x.resize(3 * per_class, d);
    y.clear();
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < per_class; ++i) {
            const int r = c * per_class + i;
            for (int j = 0; j < d; ++j) x(r, j) = n(rng) + (j == c % d ? gap : 0.0);
            y.push_back(label_at(static_cast<std::size_t>(c)));
        }
}

} // namespace

TEST_CASE("gram matrices match their definitions") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd a = testing::random_matrix(5, 3, rng), b = testing::random_matrix(4, 3, rng);
    const Eigen::MatrixXd lin = gram(KernelSpec::linear(), a, b);
    const Eigen::MatrixXd rbf = gram(KernelSpec::rbf(0.3), a, b);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(lin(i, j) == doctest::Approx(a.row(i).dot(b.row(j))).epsilon(1e-14));
            CHECK(rbf(i, j) == doctest::Approx(std::exp(-0.3 * (a.row(i) - b.row(j)).squaredNorm())).epsilon(1e-13));
        }
    CHECK_THROWS_AS(gram(KernelSpec::linear(), a, Eigen::MatrixXd::Zero(2, 2)), DataError);
    CHECK_THROWS_AS(KernelSpec::rbf(0.0).validate(), ConfigError);
    CHECK(parse_kernel_kind("rbf") == KernelKind::Rbf);
    CHECK_THROWS_AS(parse_kernel_kind("poly"), ConfigError);
}

TEST_CASE("standardizer z-scores and passes constant columns through") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 5, 2, 5, 3, 5, 4, 5;
    const Standardizer s = Standardizer::fit(x);
    const Eigen::MatrixXd z = s.apply(x);
    CHECK(z.col(0).mean() == doctest::Approx(0.0));
    CHECK(std::sqrt(z.col(0).squaredNorm() / 4) == doctest::Approx(1.0));
    CHECK(z.col(1) == x.col(1));
    CHECK(Standardizer::identity(2).apply(x) == x);
}

TEST_CASE("class balance weights are inverse class frequencies with mean one") {
    const std::vector<Label> y{Label::Low, Label::Low, Label::Low, Label::Medium, Label::High, Label::High};
    const Eigen::VectorXd w = class_balance_weights(y);
    CHECK(w.mean() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w(0) / w(3) == doctest::Approx(1.0 / 3));
    CHECK(w(4) / w(3) == doctest::Approx(0.5));
    const Eigen::MatrixXd t = one_hot(y);
    CHECK(t.rowwise().sum() == Eigen::VectorXd::Ones(6));
    CHECK(t(3, 1) == 1.0);
}

TEST_CASE("KELM solves the regularized system to tight residuals") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 20 + 28 * trial;
        const Eigen::MatrixXd k = random_psd(n, rng);
        const Eigen::MatrixXd t = testing::random_matrix(n, 3, rng);
        const double c = std::pow(10.0, trial % 5 - 2);
        const Eigen::MatrixXd beta = fit_kelm(k, t, c);
        const Eigen::MatrixXd lhs = (Eigen::MatrixXd::Identity(n, n) / c + k) * beta;
        CHECK((lhs - t).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK_THROWS_AS(fit_kelm(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 3), 0.0), ConfigError);
    CHECK_THROWS_AS(fit_kelm(Eigen::MatrixXd::Identity(3, 2), Eigen::MatrixXd::Zero(3, 3), 1.0), DataError);
}

TEST_CASE("weighted KELM solves (I/C + W K) beta = W T and reduces to KELM for balanced classes") {
    std::mt19937_64 rng(3);
    const Eigen::Index n = 60;
    const Eigen::MatrixXd k = random_psd(n, rng);
    const Eigen::MatrixXd t = testing::random_matrix(n, 3, rng);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Eigen::VectorXd w(n);
    for (auto& v : w) v = u(rng);
    const Eigen::MatrixXd beta = fit_kelm(k, t, 2.0, &w);
    const Eigen::MatrixXd lhs = (Eigen::MatrixXd::Identity(n, n) / 2.0 + w.asDiagonal() * k) * beta;
    CHECK((lhs - w.asDiagonal() * t).cwiseAbs().maxCoeff() < 1e-8);

    std::vector<Label> balanced;
    for (Eigen::Index i = 0; i < n; ++i) balanced.push_back(label_at(static_cast<std::size_t>(i % 3)));
    const Eigen::VectorXd bw = class_balance_weights(balanced);
    const Eigen::MatrixXd plain = fit_kelm(k, balanced, 2.0);
    const Eigen::MatrixXd weighted = fit_kelm(k, balanced, 2.0, &bw);
    CHECK((plain - weighted).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("KPLS with n-1 components interpolates the training targets") {
    std::mt19937_64 rng(4);
    const Eigen::Index n = 12;
    const Eigen::MatrixXd x = testing::random_matrix(n, 20, rng);
    const Eigen::MatrixXd k = gram(KernelSpec::linear(), x, x);
    const Eigen::MatrixXd y = testing::random_matrix(n, 3, rng);
    const KplsSolution s = fit_kpls(k, y, static_cast<int>(n - 1));
    CHECK((kpls_predict(s, k) - y).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(s.center_weights.sum() == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_kpls(k, y, static_cast<int>(n)), ConfigError);
    CHECK_THROWS_AS(fit_kpls(k, y, 0), ConfigError);
}

TEST_CASE("KPLS with one component predicts the target mean plus a rank-one term") {
    std::mt19937_64 rng(5);
    const Eigen::Index n = 30;
    const Eigen::MatrixXd x = testing::random_matrix(n, 4, rng);
    const Eigen::MatrixXd k = gram(KernelSpec::linear(), x, x);
    const Eigen::MatrixXd y = testing::random_matrix(n, 3, rng);
    const KplsSolution s = fit_kpls(k, y, 1);
    const Eigen::MatrixXd pred = kpls_predict(s, k);
    // Centred predictions have rank one and average to the target mean.
    const Eigen::MatrixXd centred = pred.rowwise() - y.colwise().mean();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
    CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));
    CHECK((pred.colwise().mean() - y.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("weighted KPLS with uniform weights equals plain KPLS") {
    std::mt19937_64 rng(6);
    const Eigen::Index n = 25;
    const Eigen::MatrixXd x = testing::random_matrix(n, 5, rng);
    const Eigen::MatrixXd k = gram(KernelSpec::rbf(0.2), x, x);
    const Eigen::MatrixXd y = testing::random_matrix(n, 3, rng);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
    const Eigen::MatrixXd a = kpls_predict(fit_kpls(k, y, 4), k);
    const Eigen::MatrixXd b = kpls_predict(fit_kpls(k, y, 4, &w), k);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ridge matches the normal equations in primal and dual form") {
    std::mt19937_64 rng(7);
    for (Eigen::Index d : {5, 40}) {
        const Eigen::Index n = 20;
        const Eigen::MatrixXd x = testing::random_matrix(n, d, rng);
        const Eigen::MatrixXd t = testing::random_matrix(n, 3, rng);
        const RidgeSolution s = fit_ridge(x, t, 0.7);
        const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
        const Eigen::MatrixXd tc = t.rowwise() - t.colwise().mean();
        const Eigen::MatrixXd w =
            (xc.transpose() * xc + 0.7 * Eigen::MatrixXd::Identity(d, d)).ldlt().solve(xc.transpose() * tc);
        CHECK((s.weights - w).cwiseAbs().maxCoeff() < 1e-10);
        const Eigen::RowVectorXd b = t.colwise().mean() - x.colwise().mean() * w;
        CHECK((s.intercept - b).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("argmax tie rules") {
    const ClassCounts counts{10, 30, 5};
    auto am = [&](double l, double m, double h, const ClassCounts& c) {
        Eigen::RowVectorXd s(3);
        s << l, m, h;
        return argmax_label(s, c);
    };
    CHECK(am(1, 0, 0, counts) == Label::Low);
    CHECK(am(1, 1, 1, counts) == Label::Medium);
    CHECK(am(1, 1, 0, counts) == Label::Medium);
    CHECK(am(1, 0, 1, counts) == Label::High);
    CHECK(am(1, 0, 1, ClassCounts{5, 30, 10}) == Label::Low);
    CHECK(am(1, 0, 1, ClassCounts{5, 30, 5}) == Label::Low);
    CHECK(am(1.0, 0.0, 1.0 - 1e-14, counts) == Label::High);
}

TEST_CASE("every classifier separates well-separated blobs") {
    std::mt19937_64 rng(8);
    Eigen::MatrixXd x, xt;
    std::vector<Label> y, yt;
    blobs(30, 3, rng, x, y);
    blobs(20, 3, rng, xt, yt);
    for (ModelKind kind : {ModelKind::Kelm, ModelKind::Wkelm, ModelKind::Kpls, ModelKind::Wkpls, ModelKind::RidgeOvr}) {
        for (KernelSpec kernel : {KernelSpec::linear(), KernelSpec::rbf(0.1)}) {
            ModelSpec spec;
            spec.kind = kind;
            spec.kernel = kernel;
            spec.components = 4;
            const TrainedModel m = fit_model(spec, x, y);
            std::vector<std::string> ids(yt.size(), "x");
            const PredictionSet p = predict(m, xt, ids);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < yt.size(); ++i) hits += p.labels[i] == yt[i];
            CHECK_MESSAGE(hits >= 55, spec.describe());
            CHECK(p.source == spec.describe());
        }
    }
}

TEST_CASE("fit_model rejects degenerate training sets") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
    const std::vector<Label> one_class(4, Label::High);
    CHECK_THROWS_AS(fit_model(ModelSpec{}, x, one_class), DataError);
    const std::vector<Label> short_labels{Label::Low};
    CHECK_THROWS_AS(fit_model(ModelSpec{}, x, short_labels), DataError);
    CHECK_THROWS_AS(parse_model_kind("svm"), ConfigError);
}

TEST_CASE("trained models and prediction files round trip") {
    const auto dir = testing::scratch_dir("learn_io");
    std::mt19937_64 rng(9);
    Eigen::MatrixXd x;
    std::vector<Label> y;
    blobs(10, 3, rng, x, y);
    for (ModelKind kind : {ModelKind::Kelm, ModelKind::Kpls, ModelKind::RidgeOvr}) {
        ModelSpec spec;
        spec.kind = kind;
        spec.kernel = KernelSpec::rbf(0.5);
        const TrainedModel m = fit_model(spec, x, y);
        save_model(dir / "m.afp", m);
        const TrainedModel back = load_model(dir / "m.afp");
        CHECK(decision_scores(back, x) == decision_scores(m, x));
        CHECK(back.class_counts == m.class_counts);
    }

    PredictionSet set = testing::one_hot_set({Label::Low, Label::High, Label::Medium}, "model, with comma");
    set.scores(1, 0) = 0.123456789012345678;
    write_predictions_csv(dir / "p.csv", set);
    const PredictionSet back = read_predictions_csv(dir / "p.csv");
    CHECK(back.story_ids == set.story_ids);
    CHECK(back.labels == set.labels);
    CHECK(back.scores == set.scores);
    CHECK(back.source == set.source);

    const PredictionSet reordered = align_to(set, {"s2", "s0", "s1"});
    CHECK(reordered.labels == std::vector<Label>{Label::Medium, Label::Low, Label::High});
    CHECK_THROWS_AS(align_to(set, {"s9"}), DataError);
    CHECK_THROWS_AS(require_aligned(set, reordered), DataError);
    CHECK_NOTHROW(require_aligned(set, back));
}
