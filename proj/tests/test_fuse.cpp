#include <doctest.h>

#include <algorithm>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"
#include "affect/eval/metrics.hpp"
#include "affect/fuse/fusion.hpp"
#include "test_support.hpp"

using namespace affect;
using namespace affect::fuse;

namespace {

PredictionSet random_scored_set(std::size_t n, std::mt19937_64& rng, const ClassCounts& counts) {
    PredictionSet s;
    s.scores = testing::random_matrix(static_cast<Eigen::Index>(n), 3, rng);
    for (std::size_t i = 0; i < n; ++i) s.story_ids.push_back("s" + std::to_string(i));
    learn::assign_labels(s, counts);
    s.source = "random";
    return s;
}

} // namespace

TEST_CASE("fuse_two matches the golden truth table") {
    const CsvTable table = read_csv(testing::data_dir() / "fuse_two_truth_table.csv");
    REQUIRE(table.rows.size() == 36);
    const std::size_t cp = table.column("p"), cs = table.column("s"), cm = table.column("minority_set"),
                      ce = table.column("expected");
    std::vector<Label> p, s, expected;
    for (const auto& row : table.rows) {
        const Label got = fuse_two_labels(parse_label(row[cp]), parse_label(row[cs]), LabelSet::parse(row[cm]));
        CHECK_MESSAGE(got == parse_label(row[ce]), row[cp] << row[cs] << " minority {" << row[cm] << "}");
    }
}

TEST_CASE("fuse_two on prediction sets uses the context minority set and mean scores") {
    const PredictionSet p = testing::one_hot_set({Label::Medium, Label::Medium, Label::Low, Label::High}, "P");
    const PredictionSet s = testing::one_hot_set({Label::Low, Label::High, Label::High, Label::Medium}, "S");
    FusionContext ctx = FusionContext::from_counts({10, 40, 20});
    CHECK(ctx.minority_set.to_string() == "LH");
    const PredictionSet f = fuse_two(p, s, ctx);
    CHECK(f.labels == std::vector<Label>{Label::Low, Label::High, Label::Medium, Label::High});
    CHECK(f.scores == (p.scores + s.scores) / 2.0);
    CHECK(f.story_ids == p.story_ids);

    const PredictionSet shuffled = learn::align_to(s, {"s1", "s0", "s2", "s3"});
    CHECK_THROWS_AS(fuse_two(p, shuffled, ctx), DataError);
}

TEST_CASE("fuse_two of a set with itself is the identity") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const PredictionSet x = testing::one_hot_set(testing::random_labels(50, rng));
        FusionContext ctx;
        ctx.minority_set = LabelSet::parse(std::vector<std::string>{"", "L", "H", "LH", "M"}[trial % 5]);
        CHECK(fuse_two(x, x, ctx).labels == x.labels);
    }
}

TEST_CASE("majority vote: plurality and tie rules") {
    const ClassCounts counts{30, 50, 20};
    const FusionContext ctx = FusionContext::from_counts(counts);
    auto vote = [&](std::vector<Label> votes, const FusionContext& c) {
        std::vector<PredictionSet> sets;
        for (Label l : votes) sets.push_back(testing::one_hot_set({l}));
        return majority_vote(sets, c).labels.front();
    };
    CHECK(vote({Label::Low, Label::Low, Label::High}, ctx) == Label::Low);
    CHECK(vote({Label::Low, Label::Medium, Label::High}, ctx) == Label::Medium);
    // Two-two ties go to the tied label with the smaller training count.
    CHECK(vote({Label::Low, Label::Low, Label::High, Label::High}, ctx) == Label::High);
    CHECK(vote({Label::Low, Label::Low, Label::Medium, Label::Medium}, ctx) == Label::Low);
    // Equal counts among the tied labels: M if tied, else L.
    const FusionContext flat = FusionContext::from_counts({10, 10, 10});
    CHECK(vote({Label::Low, Label::Low, Label::Medium, Label::Medium}, flat) == Label::Medium);
    CHECK(vote({Label::Low, Label::Low, Label::High, Label::High}, flat) == Label::Low);
    CHECK(vote({Label::Low, Label::Low, Label::Medium, Label::Medium, Label::High}, flat) == Label::Medium);

    const std::vector<PredictionSet> two{testing::one_hot_set({Label::Low}), testing::one_hot_set({Label::High})};
    CHECK_THROWS_AS(majority_vote(two, ctx), ConfigError);
}

TEST_CASE("majority vote is invariant to the order of its inputs") {
    std::mt19937_64 rng(2);
    const FusionContext ctx = FusionContext::from_counts({12, 30, 9});
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PredictionSet> sets;
        for (int m = 0; m < 3 + trial % 3; ++m) sets.push_back(testing::one_hot_set(testing::random_labels(40, rng)));
        const auto reference = majority_vote(sets, ctx).labels;
        std::vector<std::size_t> order(sets.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        while (std::next_permutation(order.begin(), order.end())) {
            std::vector<PredictionSet> permuted;
            for (std::size_t i : order) permuted.push_back(sets[i]);
            CHECK(majority_vote(permuted, ctx).labels == reference);
        }
    }
}

TEST_CASE("weighted fusion with a one-hot weight vector reproduces that set") {
    std::mt19937_64 rng(3);
    const ClassCounts counts{20, 40, 25};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<PredictionSet> sets;
        for (int m = 0; m < 3; ++m) {
            PredictionSet s = random_scored_set(60, rng, counts);
            s.scores = s.scores * (1.0 + m) + Eigen::MatrixXd::Constant(60, 3, 5.0 * m);
            learn::assign_labels(s, counts);
            sets.push_back(s);
        }
        for (std::size_t m = 0; m < 3; ++m) {
            std::vector<double> w(3, 0.0);
            w[m] = 1.0;
            CHECK(weighted_score_fusion(sets, w, counts).labels == sets[m].labels);
        }
    }
}

TEST_CASE("weighted fusion z-normalizes each set before mixing") {
    PredictionSet a, b;
    a.story_ids = b.story_ids = {"x", "y"};
    a.scores.resize(2, 3);
    a.scores << 0, 1, 2, 3, 4, 5;
    b.scores = a.scores * 100.0 + Eigen::MatrixXd::Constant(2, 3, 7.0);
    const std::vector<PredictionSet> sets{a, b};
    const std::vector<double> w{0.5, 0.5};
    const PredictionSet f = weighted_score_fusion(sets, w, {1, 1, 1});
    // Both sets normalize to the same z-scores: mean 2.5, population std sqrt(35/12).
    const double sd = std::sqrt(35.0 / 12.0);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) CHECK(f.scores(r, c) == doctest::Approx((a.scores(r, c) - 2.5) / sd));

    CHECK_THROWS_AS(weighted_score_fusion(sets, std::vector<double>{0.7, 0.7}, {1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(weighted_score_fusion(sets, std::vector<double>{1.5, -0.5}, {1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(weighted_score_fusion(sets, std::vector<double>{1.0}, {1, 1, 1}), ConfigError);
}

TEST_CASE("simplex grid enumeration") {
    const auto g = simplex_grid(2, 0.5);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == std::vector<double>{1.0, 0.0});
    CHECK(g[1] == std::vector<double>{0.5, 0.5});
    CHECK(g[2] == std::vector<double>{0.0, 1.0});
    CHECK(simplex_grid(1, 0.1) == std::vector<std::vector<double>>{{1.0}});
    CHECK(simplex_grid(3, 0.1).size() == 66);
    for (const auto& w : simplex_grid(3, 0.25)) {
        double total = 0.0;
        for (double x : w) total += x;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(simplex_grid(0, 0.1), ConfigError);
    CHECK_THROWS_AS(simplex_grid(2, 0.3), ConfigError);
}

TEST_CASE("fusion weight search") {
    std::mt19937_64 rng(4);
    const ClassCounts counts{1, 1, 1};
    const std::vector<Label> truth = testing::random_labels(90, rng);
    const PredictionSet perfect = testing::one_hot_set(truth);
    const PredictionSet noisy = testing::one_hot_set(testing::random_labels(90, rng));
    const std::vector<PredictionSet> single{perfect};
    CHECK(search_fusion_weights(single, truth, 0.1, counts) == std::vector<double>{1.0});

    const std::vector<PredictionSet> sets{perfect, noisy};
    const auto w = search_fusion_weights(sets, truth, 0.1, counts);
    const auto fused = weighted_score_fusion(sets, w, counts);
    CHECK(eval::uar(truth, fused.labels) == 1.0);

    // Identical sets tie everywhere; the most uniform vector wins.
    const std::vector<PredictionSet> twins{noisy, noisy};
    CHECK(search_fusion_weights(twins, truth, 0.5, counts) == std::vector<double>{0.5, 0.5});
    const std::vector<Label> short_truth(3, Label::Low);
    CHECK_THROWS_AS(search_fusion_weights(sets, short_truth, 0.1, counts), DataError);
}

TEST_CASE("designation helper puts the better minority-recall model in S") {
    eval::ConfusionMatrix majority_biased, minority_biased;
    majority_biased.at(Label::Low, Label::Medium) = 10;
    majority_biased.at(Label::Medium, Label::Medium) = 30;
    majority_biased.at(Label::High, Label::Medium) = 10;
    minority_biased.at(Label::Low, Label::Low) = 8;
    minority_biased.at(Label::Medium, Label::Low) = 15;
    minority_biased.at(Label::Medium, Label::Medium) = 15;
    minority_biased.at(Label::High, Label::High) = 9;
    const LabelSet minority = LabelSet::parse("LH");
    CHECK(designate_majority_minority(majority_biased, minority_biased, minority) == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(designate_majority_minority(minority_biased, majority_biased, minority) == std::pair<std::size_t, std::size_t>{1, 0});
}
