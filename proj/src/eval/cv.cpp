#include "affect/eval/cv.hpp"

#include <algorithm>
#include <exception>
#include <map>

#include "affect/common/errors.hpp"
#include "affect/common/parallel.hpp"
#include "affect/eval/label_store.hpp"
#include "affect/fuse/fusion.hpp"

namespace affect::eval {

namespace {

[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(context + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(context + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(context + ": " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(context + ": " + e.what());
    }
}

std::vector<std::size_t> complement(std::span<const std::size_t> all, std::span<const std::size_t> held_out) {
    std::vector<std::size_t> out;
    std::set_difference(all.begin(), all.end(), held_out.begin(), held_out.end(), std::back_inserter(out));
    return out;
}

std::vector<std::string> ids_of(const CvDataset& data, std::span<const std::size_t> indices) {
    std::vector<std::string> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(data.story_ids[i]);
    return out;
}

ClassCounts count_labels(std::span<const Label> labels) {
    ClassCounts c{};
    for (Label l : labels) ++c[index_of(l)];
    return c;
}

FeatureSplit build_checked(const FeatureBuilder& features, const FeatureRequest& req) {
    FeatureSplit fs = features(req);
    if (fs.train.rows() != static_cast<Eigen::Index>(req.train.size()) ||
        fs.eval.rows() != static_cast<Eigen::Index>(req.eval.size()))
        throw DataError("feature builder returned the wrong number of rows");
    if (fs.train.cols() != fs.eval.cols()) throw DataError("feature builder returned mismatched widths");
    if (fs.train.cols() == 0) throw DataError("feature builder returned no features");
    return fs;
}

} // namespace

learn::PredictionSet fuse_fold_models(std::span<const learn::PredictionSet> sets, const ClassCounts& counts) {
    if (sets.empty()) throw ConfigError("no fold predictions to fuse");
    if (sets.size() >= 3) return fuse::majority_vote(sets, fuse::FusionContext::from_counts(counts));
    learn::PredictionSet out = sets[0];
    for (std::size_t m = 1; m < sets.size(); ++m) {
        learn::require_aligned(sets[0], sets[m]);
        out.scores += sets[m].scores;
    }
    out.scores /= static_cast<double>(sets.size());
    learn::assign_labels(out, counts);
    out.source = "fold_mean(" + std::to_string(sets.size()) + ")";
    return out;
}

CvResult run_cv(const CvDataset& data, const FeatureBuilder& features, const learn::ModelSpec& model,
                const CvOptions& options) {
    const auto labeled = data.labeled_indices();
    CvResult result;
    result.plan = plan_folds(data, labeled, options.folds, options.seed);
    const auto held = result.plan.partition(data, labeled);
    std::vector<std::size_t> test = options.test_indices;
    std::sort(test.begin(), test.end());
    for (std::size_t i : test)
        if (i >= data.size()) throw DataError("test story index out of range");

    result.folds.resize(options.folds);
    parallel_for(options.folds, [&](std::size_t k) {
        try {
            FoldResult& fr = result.folds[k];
            fr.fold = k;
            fr.held_out = held[k];
            const auto train = complement(labeled, held[k]);
            std::vector<Label> train_labels;
            for (std::size_t i : train) train_labels.push_back(*data.labels[i]);
            std::vector<std::size_t> eval = held[k];
            eval.insert(eval.end(), test.begin(), test.end());

            const FeatureSplit fs = build_checked(features, FeatureRequest{train, train_labels, eval});
            fr.model = learn::fit_model(model, fs.train, train_labels);
            const auto h = static_cast<Eigen::Index>(held[k].size());
            fr.predictions = learn::predict(fr.model, fs.eval.topRows(h), ids_of(data, held[k]), options.source);
            if (!test.empty())
                fr.test_predictions = learn::predict(fr.model, fs.eval.bottomRows(fs.eval.rows() - h),
                                                     ids_of(data, test), options.source);
            std::vector<Label> truth;
            for (std::size_t i : held[k]) truth.push_back(*data.labels[i]);
            fr.confusion = confusion(truth, fr.predictions.labels);
            fr.uar = uar(fr.confusion);
        } catch (...) {
            rethrow_with_context("fold " + std::to_string(k));
        }
    });

    std::map<std::size_t, std::pair<std::size_t, std::size_t>> where;  // story -> (fold, row)
    for (const auto& fr : result.folds)
        for (std::size_t r = 0; r < fr.held_out.size(); ++r) where[fr.held_out[r]] = {fr.fold, r};
    auto& oof = result.out_of_fold;
    oof.source = options.source;
    oof.scores.resize(static_cast<Eigen::Index>(labeled.size()), 3);
    for (std::size_t j = 0; j < labeled.size(); ++j) {
        const auto [f, r] = where.at(labeled[j]);
        const auto& p = result.folds[f].predictions;
        oof.story_ids.push_back(p.story_ids[r]);
        oof.labels.push_back(p.labels[r]);
        oof.scores.row(static_cast<Eigen::Index>(j)) = p.scores.row(static_cast<Eigen::Index>(r));
        result.truth.push_back(*data.labels[labeled[j]]);
    }
    result.confusion = confusion(result.truth, oof.labels);
    result.uar = uar(result.confusion);

    if (!test.empty()) {
        std::vector<learn::PredictionSet> sets;
        for (const auto& fr : result.folds) sets.push_back(fr.test_predictions);
        result.test_fused = fuse_fold_models(sets, count_labels(result.truth));
    }
    return result;
}

NestedResult run_nested_cv(const CvDataset& data, const FeatureBuilder& features,
                           std::span<const learn::ModelSpec> grid, const NestedOptions& options) {
    if (grid.empty()) throw ConfigError("nested CV: empty hyper-parameter grid");
    const auto labeled = data.labeled_indices();
    const FoldPlan outer = plan_folds(data, labeled, options.outer_folds, options.seed);
    const auto held = outer.partition(data, labeled);

    AuditedLabelStore store(data.labels);
    for (std::size_t k = 0; k < held.size(); ++k) store.seal(k, held[k]);

    NestedResult result;
    result.folds.resize(options.outer_folds);
    parallel_for(options.outer_folds, [&](std::size_t k) {
        try {
            OuterFoldResult& fr = result.folds[k];
            fr.fold = k;
            auto access = store.access(k);
            const auto train = complement(labeled, held[k]);
            const std::vector<Label> train_labels = access.labels(train);

            // Inner planning sees only the outer-training labels.
            CvDataset inner_data{data.story_ids, data.speaker_ids,
                                 std::vector<std::optional<Label>>(data.size())};
            std::map<std::size_t, Label> label_of;
            for (std::size_t j = 0; j < train.size(); ++j) {
                inner_data.labels[train[j]] = train_labels[j];
                label_of[train[j]] = train_labels[j];
            }
            const std::uint64_t inner_seed = options.seed + 0x9E3779B97F4A7C15ULL * (k + 1);
            const FoldPlan inner = plan_folds(inner_data, train, options.inner_folds, inner_seed);
            const auto inner_held = inner.partition(inner_data, train);

            std::vector<std::vector<Label>> inner_pred(grid.size());
            std::vector<Label> inner_truth;
            for (std::size_t j = 0; j < inner_held.size(); ++j) {
                const auto inner_train = complement(train, inner_held[j]);
                std::vector<Label> inner_train_labels;
                for (std::size_t i : inner_train) inner_train_labels.push_back(label_of.at(i));
                const FeatureSplit fs =
                    build_checked(features, FeatureRequest{inner_train, inner_train_labels, inner_held[j]});
                for (std::size_t i : inner_held[j]) inner_truth.push_back(label_of.at(i));
                for (std::size_t g = 0; g < grid.size(); ++g) {
                    const auto model = learn::fit_model(grid[g], fs.train, inner_train_labels);
                    const auto p = learn::predict(model, fs.eval, ids_of(data, inner_held[j]));
                    inner_pred[g].insert(inner_pred[g].end(), p.labels.begin(), p.labels.end());
                }
            }
            fr.inner_uar.resize(grid.size());
            for (std::size_t g = 0; g < grid.size(); ++g) {
                fr.inner_uar[g] = uar(inner_truth, inner_pred[g]);
                if (fr.inner_uar[g] > fr.inner_uar[fr.chosen]) fr.chosen = g;
            }

            const FeatureSplit fs = build_checked(features, FeatureRequest{train, train_labels, held[k]});
            const auto model = learn::fit_model(grid[fr.chosen], fs.train, train_labels);
            fr.predictions = learn::predict(model, fs.eval, ids_of(data, held[k]), options.source);

            access.open_for_scoring();
            const auto truth = access.labels(held[k]);
            fr.confusion = confusion(truth, fr.predictions.labels);
            fr.uar = uar(fr.confusion);
        } catch (...) {
            rethrow_with_context("outer fold " + std::to_string(k));
        }
    });

    std::vector<Label> pooled_truth, pooled_pred;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> where;
    double sum = 0.0;
    for (const auto& fr : result.folds) {
        sum += fr.uar;
        for (std::size_t r = 0; r < held[fr.fold].size(); ++r) where[held[fr.fold][r]] = {fr.fold, r};
    }
    result.mean_uar = sum / static_cast<double>(result.folds.size());
    auto& oof = result.out_of_fold;
    oof.source = options.source;
    oof.scores.resize(static_cast<Eigen::Index>(labeled.size()), 3);
    for (std::size_t j = 0; j < labeled.size(); ++j) {
        const auto [f, r] = where.at(labeled[j]);
        const auto& p = result.folds[f].predictions;
        oof.story_ids.push_back(p.story_ids[r]);
        oof.labels.push_back(p.labels[r]);
        oof.scores.row(static_cast<Eigen::Index>(j)) = p.scores.row(static_cast<Eigen::Index>(r));
        pooled_truth.push_back(*data.labels[labeled[j]]);
    }
    result.pooled_uar = uar(pooled_truth, oof.labels);
    result.pre_scoring_reads = store.pre_scoring_reads();
    result.scoring_reads = store.scoring_reads();
    return result;
}

} // namespace affect::eval
