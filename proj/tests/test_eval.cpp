#include <doctest.h>

#include <algorithm>
#include <set>

#include "affect/common/errors.hpp"
#include "affect/eval/cv.hpp"
#include "affect/eval/folds.hpp"
#include "affect/eval/label_store.hpp"
#include "affect/eval/metrics.hpp"
#include "test_support.hpp"

using namespace affect;
using namespace affect::eval;

namespace {

double brute_force_uar(const std::vector<Label>& t, const std::vector<Label>& p) {
    double total = 0.0;
    int present = 0;
    for (Label c : kAllLabels) {
        int n = 0, hit = 0;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] == c) {
                ++n;
                hit += p[i] == c;
            }
        if (n > 0) {
            total += static_cast<double>(hit) / n;
            ++present;
        }
    }
    return total / present;
}

/// `speakers` speakers with `per` stories each and random labels; `unlabeled`
/// extra speakers without labels.
CvDataset make_dataset(std::size_t speakers, std::size_t per, std::mt19937_64& rng, std::size_t unlabeled = 0) {
    CvDataset d;
    for (std::size_t s = 0; s < speakers + unlabeled; ++s)
        for (std::size_t j = 0; j < per; ++j) {
            d.story_ids.push_back("sp" + std::to_string(s) + "_" + std::to_string(j));
            d.speaker_ids.push_back("sp" + std::to_string(s));
            d.labels.push_back(s < speakers ? std::optional<Label>(label_at(rng() % 3)) : std::nullopt);
        }
    return d;
}

/// Builder that slices a fixed feature matrix.
FeatureBuilder fixed_features(Eigen::MatrixXd x) {
    return [x = std::move(x)](const FeatureRequest& r) {
        FeatureSplit out;
        out.train.resize(static_cast<Eigen::Index>(r.train.size()), x.cols());
        out.eval.resize(static_cast<Eigen::Index>(r.eval.size()), x.cols());
        for (std::size_t i = 0; i < r.train.size(); ++i)
            out.train.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(r.train[i]));
        for (std::size_t i = 0; i < r.eval.size(); ++i)
            out.eval.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(r.eval[i]));
        return out;
    };
}

/// Features that encode the label for training rows only; evaluation rows get noise.
FeatureBuilder leaky_features(std::uint64_t seed) {
    return [seed](const FeatureRequest& r) {
        std::mt19937_64 rng(seed + r.train.size() * 131 + r.eval.front());
        FeatureSplit out;
        out.train = testing::random_matrix(static_cast<Eigen::Index>(r.train.size()), 3, rng) * 0.1;
        for (std::size_t i = 0; i < r.train.size(); ++i)
            out.train(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(index_of(r.train_labels[i]))) += 1.0;
        out.eval = testing::random_matrix(static_cast<Eigen::Index>(r.eval.size()), 3, rng) * 0.1;
        return out;
    };
}

Eigen::MatrixXd label_column(const CvDataset& d, std::mt19937_64& rng, double noise) {
    Eigen::MatrixXd x = testing::random_matrix(static_cast<Eigen::Index>(d.size()), 3, rng) * noise;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d.labels[i]) x(static_cast<Eigen::Index>(i), 0) += static_cast<double>(index_of(*d.labels[i]));
    return x;
}

learn::ModelSpec ridge() {
    learn::ModelSpec s;
    s.kind = learn::ModelKind::RidgeOvr;
    return s;
}

learn::ModelSpec kelm_rbf(double gamma, double c) {
    learn::ModelSpec s;
    s.kind = learn::ModelKind::Kelm;
    s.kernel = learn::KernelSpec::rbf(gamma);
    s.c_reg = c;
    return s;
}

} // namespace

TEST_CASE("UAR examples") {
    using L = Label;
    const std::vector<Label> t{L::Low, L::Low, L::Medium, L::High}, p{L::Low, L::Medium, L::Medium, L::High};
    CHECK(uar(t, p) == doctest::Approx(2.5 / 3).epsilon(1e-15));
    CHECK(uar(t, t) == 1.0);
    const std::vector<Label> all_m(5, L::Medium);
    CHECK(uar(all_m, all_m) == 1.0);
    const std::vector<Label> short_p{L::Low};
    CHECK_THROWS_AS(uar(t, short_p), DataError);
    CHECK_THROWS_AS(uar(std::vector<Label>{}, std::vector<Label>{}), DataError);
}

TEST_CASE("UAR and accuracy agree with brute-force counters") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 60;
        const auto t = testing::random_labels(n, rng), p = testing::random_labels(n, rng);
        CHECK(std::abs(uar(t, p) - brute_force_uar(t, p)) <= 1e-12);
        const ConfusionMatrix cm = confusion(t, p);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) correct += t[i] == p[i];
        CHECK(cm.accuracy() == doctest::Approx(static_cast<double>(correct) / n));
        CHECK(cm.total() == static_cast<long>(n));
        for (Label c : kAllLabels)
            CHECK(cm.row_total(c) == static_cast<long>(std::count(t.begin(), t.end(), c)));

        // Simultaneous permutation of truth and prediction leaves UAR unchanged.
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<Label> tp, pp;
        for (std::size_t i : order) {
            tp.push_back(t[i]);
            pp.push_back(p[i]);
        }
        CHECK(uar(tp, pp) == uar(t, p));
    }
}

TEST_CASE("confusion matrix CSV and recall") {
    using L = Label;
    const std::vector<Label> t{L::Low, L::Low, L::High}, p{L::Low, L::High, L::High};
    const ConfusionMatrix cm = confusion(t, p);
    CHECK(cm.at(L::Low, L::High) == 1);
    CHECK(*cm.recall(L::Low) == 0.5);
    CHECK_FALSE(cm.recall(L::Medium).has_value());
    CHECK(cm.to_csv().find("truth") != std::string::npos);
}

TEST_CASE("fold plans are speaker-disjoint, balanced and deterministic") {
    std::mt19937_64 rng(2);
    const CvDataset eight = make_dataset(8, 3, rng);
    const FoldPlan p8 = plan_folds(eight, 4, 11);
    std::vector<int> per_fold(4, 0);
    for (const auto& [spk, f] : p8.assignment) ++per_fold[f];
    CHECK(per_fold == std::vector<int>{2, 2, 2, 2});

    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t speakers = 5 + rng() % 40, n = 2 + rng() % 4;
        const CvDataset d = make_dataset(speakers, 1 + rng() % 4, rng);
        const FoldPlan plan = plan_folds(d, n, trial);
        CHECK(plan.assignment.size() == speakers);
        std::vector<int> sizes(n, 0);
        for (const auto& [spk, f] : plan.assignment) ++sizes[f];
        CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);

        const auto parts = plan.partition(d, d.labeled_indices());
        std::set<std::size_t> seen;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i : parts[k]) {
                CHECK(plan.fold_of(d.speaker_ids[i]) == k);
                CHECK(seen.insert(i).second);
            }
        CHECK(seen.size() == d.size());

        const FoldPlan again = plan_folds(d, n, trial);
        CHECK(again.assignment == plan.assignment);
    }
}

TEST_CASE("fold planning errors") {
    std::mt19937_64 rng(3);
    const CvDataset d = make_dataset(3, 2, rng);
    CHECK_THROWS_AS(plan_folds(d, 1, 0), ConfigError);
    CHECK_THROWS_AS(plan_folds(d, 4, 0), DataError);
    CHECK_THROWS_AS(plan_folds(d, 3, 0).fold_of("nobody"), DataError);
}

TEST_CASE("audited label store counts reads by phase") {
    AuditedLabelStore store({Label::Low, Label::High, Label::Medium, std::nullopt});
    const std::vector<std::size_t> sealed{1, 2};
    store.seal(0, sealed);
    CHECK_THROWS_AS(store.seal(1, std::vector<std::size_t>{2}), ConfigError);
    auto other = store.access(1);
    CHECK(other.label(1) == Label::High);
    CHECK(store.pre_scoring_reads() == 0);
    auto own = store.access(0);
    CHECK(own.label(0) == Label::Low);
    CHECK(store.pre_scoring_reads() == 0);
    own.label(2);
    CHECK(store.pre_scoring_reads() == 1);
    own.open_for_scoring();
    own.labels(sealed);
    CHECK(store.scoring_reads() == 2);
    CHECK(store.total_reads() == 5);
    CHECK_THROWS_AS(own.label(3), DataError);
}

TEST_CASE("CV with a perfectly predictive feature reaches UAR 1") {
    std::mt19937_64 rng(4);
    const CvDataset d = make_dataset(30, 3, rng, 4);
    const FeatureBuilder f = fixed_features(label_column(d, rng, 0.0));
    CvOptions opt;
    opt.seed = 5;
    opt.test_indices = d.unlabeled_indices();
    const CvResult r = run_cv(d, f, ridge(), opt);
    CHECK(r.uar == 1.0);
    CHECK(r.folds.size() == 4);
    CHECK(r.test_fused.size() == 12);
    for (const auto& fr : r.folds) CHECK(fr.test_predictions.size() == 12);
}

TEST_CASE("out-of-fold predictions cover each labeled story exactly once") {
    std::mt19937_64 rng(5);
    const CvDataset d = make_dataset(25, 3, rng, 2);
    const CvResult r = run_cv(d, fixed_features(label_column(d, rng, 0.8)), ridge(), CvOptions{});
    const auto labeled = d.labeled_indices();
    REQUIRE(r.out_of_fold.size() == labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        CHECK(r.out_of_fold.story_ids[i] == d.story_ids[labeled[i]]);
        CHECK(r.truth[i] == *d.labels[labeled[i]]);
    }
    std::multiset<std::string> held;
    for (const auto& fr : r.folds)
        for (const auto& id : fr.predictions.story_ids) held.insert(id);
    CHECK(held.size() == labeled.size());
    for (std::size_t i : labeled) CHECK(held.count(d.story_ids[i]) == 1);
}

TEST_CASE("CV is deterministic") {
    std::mt19937_64 rng(6);
    const CvDataset d = make_dataset(20, 3, rng);
    const FeatureBuilder f = fixed_features(label_column(d, rng, 1.0));
    CvOptions opt;
    opt.seed = 9;
    const CvResult a = run_cv(d, f, kelm_rbf(0.5, 1.0), opt);
    const CvResult b = run_cv(d, f, kelm_rbf(0.5, 1.0), opt);
    CHECK(a.uar == b.uar);
    CHECK(a.out_of_fold.scores == b.out_of_fold.scores);
}

TEST_CASE("leakage probe: training-only label features give chance UAR") {
    std::mt19937_64 rng(7);
    const CvDataset d = make_dataset(50, 4, rng);
    REQUIRE(d.labeled_indices().size() == 200);
    const CvResult r = run_cv(d, leaky_features(3), ridge(), CvOptions{});
    CHECK(std::abs(r.uar - 1.0 / 3.0) <= 0.1);
}

TEST_CASE("fold failures carry the fold number") {
    std::mt19937_64 rng(8);
    const CvDataset d = make_dataset(12, 2, rng);
    const FeatureBuilder bad = [](const FeatureRequest&) -> FeatureSplit { throw DataError("broken stage"); };
    try {
        run_cv(d, bad, ridge(), CvOptions{});
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("fold ") != std::string::npos);
        CHECK(std::string(e.what()).find("broken stage") != std::string::npos);
    }
}

TEST_CASE("nested CV with a one-point grid equals plain CV") {
    std::mt19937_64 rng(9);
    const CvDataset d = make_dataset(24, 3, rng);
    const FeatureBuilder f = fixed_features(label_column(d, rng, 1.0));
    const std::vector<learn::ModelSpec> grid{kelm_rbf(0.3, 2.0)};
    NestedOptions nopt;
    nopt.seed = 4;
    const NestedResult n = run_nested_cv(d, f, grid, nopt);
    CvOptions copt;
    copt.seed = 4;
    const CvResult c = run_cv(d, f, grid[0], copt);
    CHECK(n.pooled_uar == c.uar);
    CHECK(n.out_of_fold.labels == c.out_of_fold.labels);
    CHECK(n.pre_scoring_reads == 0);
    CHECK(n.scoring_reads == d.labeled_indices().size());
    CHECK_THROWS_AS(run_nested_cv(d, f, std::vector<learn::ModelSpec>{}, nopt), ConfigError);
}

TEST_CASE("nested estimate never exceeds the outer-test oracle") {
    const std::vector<learn::ModelSpec> grid{kelm_rbf(0.05, 0.1), kelm_rbf(0.5, 1.0), kelm_rbf(5.0, 100.0)};
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        std::mt19937_64 rng(100 + trial);
        const CvDataset d = make_dataset(16, 3, rng);
        const FeatureBuilder f = fixed_features(label_column(d, rng, 1.5));
        NestedOptions nopt;
        nopt.seed = trial;
        const NestedResult n = run_nested_cv(d, f, grid, nopt);
        CHECK(n.pre_scoring_reads == 0);

        std::vector<double> best(nopt.outer_folds, 0.0);
        for (const auto& spec : grid) {
            CvOptions copt;
            copt.seed = trial;
            const CvResult c = run_cv(d, f, spec, copt);
            for (std::size_t k = 0; k < c.folds.size(); ++k) best[k] = std::max(best[k], c.folds[k].uar);
        }
        double oracle = 0.0;
        for (double b : best) oracle += b / static_cast<double>(best.size());
        CHECK(n.mean_uar <= oracle + 1e-12);
        for (const auto& of : n.folds) CHECK(of.uar <= best[of.fold] + 1e-12);
    }
}

TEST_CASE("fold-model fusion") {
    const std::vector<learn::PredictionSet> three{testing::one_hot_set({Label::Low, Label::High}),
                                                  testing::one_hot_set({Label::Low, Label::Medium}),
                                                  testing::one_hot_set({Label::High, Label::Medium})};
    CHECK(fuse_fold_models(three, {1, 1, 1}).labels == std::vector<Label>{Label::Low, Label::Medium});
    const std::vector<learn::PredictionSet> two{testing::one_hot_set({Label::Low}), testing::one_hot_set({Label::Low})};
    CHECK(fuse_fold_models(two, {1, 1, 1}).labels == std::vector<Label>{Label::Low});
}
