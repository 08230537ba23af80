#include "affect/text/subset_selection.hpp"

#include <algorithm>
#include <numeric>

#include "affect/common/errors.hpp"
#include "affect/eval/metrics.hpp"
#include "affect/learn/prediction.hpp"
#include "affect/learn/solvers.hpp"

namespace affect::text {

namespace {

struct FoldCache {
    Eigen::MatrixXd gram;       // F x F, standardized training rows
    Eigen::MatrixXd cross;      // F x 3, X^T (T - mean T)
    Eigen::RowVectorXd target_mean;
    Eigen::MatrixXd test;       // standardized test rows
    std::vector<Label> truth;
    ClassCounts counts{};
};

FoldCache make_cache(const Eigen::MatrixXd& x, std::span<const Label> labels, const std::vector<std::size_t>& train,
                     const std::vector<std::size_t>& test) {
    const auto f = x.cols();
    Eigen::MatrixXd xtr(static_cast<Eigen::Index>(train.size()), f), xte(static_cast<Eigen::Index>(test.size()), f);
    std::vector<Label> train_labels;
    for (std::size_t r = 0; r < train.size(); ++r) {
        xtr.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(train[r]));
        train_labels.push_back(labels[train[r]]);
    }
    for (std::size_t r = 0; r < test.size(); ++r) xte.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(test[r]));

    const Eigen::RowVectorXd mean = xtr.colwise().mean();
    Eigen::RowVectorXd scale = ((xtr.rowwise() - mean).array().square().colwise().mean()).sqrt();
    for (Eigen::Index c = 0; c < f; ++c)
        if (!(scale[c] > 0.0)) scale[c] = 1.0;
    xtr = (xtr.rowwise() - mean).array().rowwise() / scale.array();
    xte = (xte.rowwise() - mean).array().rowwise() / scale.array();

    FoldCache cache;
    const Eigen::MatrixXd t = learn::one_hot(train_labels);
    cache.target_mean = t.colwise().mean();
    cache.gram = xtr.transpose() * xtr;
    cache.cross = xtr.transpose() * (t.rowwise() - cache.target_mean);
    cache.test = std::move(xte);
    for (std::size_t r : test) cache.truth.push_back(labels[r]);
    for (Label l : train_labels) ++cache.counts[index_of(l)];
    return cache;
}

double subset_uar(const std::vector<FoldCache>& folds, const std::vector<Eigen::Index>& subset, double lambda) {
    const auto k = static_cast<Eigen::Index>(subset.size());
    eval::ConfusionMatrix cm;
    Eigen::MatrixXd a(k, k), b(k, 3);
    for (const auto& fc : folds) {
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) a(i, j) = fc.gram(subset[i], subset[j]);
            a(i, i) += lambda;
            b.row(i) = fc.cross.row(subset[i]);
        }
        const Eigen::MatrixXd w = a.ldlt().solve(b);
        for (Eigen::Index r = 0; r < fc.test.rows(); ++r) {
            Eigen::RowVectorXd s = fc.target_mean;
            for (Eigen::Index i = 0; i < k; ++i) s += fc.test(r, subset[i]) * w.row(i);
            ++cm.at(fc.truth[static_cast<std::size_t>(r)], learn::argmax_label(s, fc.counts));
        }
    }
    return eval::uar(cm);
}

} // namespace

SubsetSearchResult select_feature_subset(const Eigen::MatrixXd& features, std::span<const std::string> names,
                                         const eval::CvDataset& data, std::span<const std::size_t> rows,
                                         std::span<const Label> labels, const SubsetSearchOptions& options) {
    if (names.empty()) throw ConfigError("feature subset search: empty candidate pool");
    if (options.max_size == 0) throw ConfigError("feature subset search: max_size must be at least 1");
    if (features.cols() != static_cast<Eigen::Index>(names.size()) ||
        features.rows() != static_cast<Eigen::Index>(rows.size()) || labels.size() != rows.size())
        throw DataError("feature subset search: feature matrix does not match names, rows or labels");

    // Columns in name order, so combinations enumerate in lexicographic name order.
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    Eigen::MatrixXd x(features.rows(), features.cols());
    for (std::size_t c = 0; c < order.size(); ++c)
        x.col(static_cast<Eigen::Index>(c)) = features.col(static_cast<Eigen::Index>(order[c]));

    eval::CvDataset masked{data.story_ids, data.speaker_ids, std::vector<std::optional<Label>>(data.size())};
    std::vector<std::size_t> position(data.size(), 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        masked.labels[rows[r]] = labels[r];
        position[rows[r]] = r;
    }
    const auto plan = eval::plan_folds(masked, rows, options.folds, options.seed);
    const auto held = plan.partition(masked, rows);
    std::vector<FoldCache> caches;
    for (const auto& fold : held) {
        std::vector<bool> in_test(rows.size(), false);
        std::vector<std::size_t> test;
        for (std::size_t s : fold) {
            test.push_back(position[s]);
            in_test[position[s]] = true;
        }
        std::vector<std::size_t> train;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!in_test[r]) train.push_back(r);
        caches.push_back(make_cache(x, labels, train, test));
    }

    SubsetSearchResult best;
    std::vector<Eigen::Index> best_subset;
    best.uar = -1.0;
    const auto f = static_cast<Eigen::Index>(names.size());
    const auto max_k = std::min<Eigen::Index>(static_cast<Eigen::Index>(options.max_size), f);
    for (Eigen::Index k = 1; k <= max_k; ++k) {
        std::vector<Eigen::Index> subset(static_cast<std::size_t>(k));
        std::iota(subset.begin(), subset.end(), 0);
        for (;;) {
            const double u = subset_uar(caches, subset, options.lambda);
            ++best.evaluated;
            if (u > best.uar + 1e-12) {
                best.uar = u;
                best_subset = subset;
            }
            // Next combination in lexicographic order.
            Eigen::Index i = k - 1;
            while (i >= 0 && subset[static_cast<std::size_t>(i)] == f - k + i) --i;
            if (i < 0) break;
            ++subset[static_cast<std::size_t>(i)];
            for (Eigen::Index j = i + 1; j < k; ++j)
                subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    for (Eigen::Index c : best_subset) best.names.push_back(names[order[static_cast<std::size_t>(c)]]);
    return best;
}

} // namespace affect::text
