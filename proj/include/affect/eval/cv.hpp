#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affect/eval/folds.hpp"
#include "affect/eval/metrics.hpp"
#include "affect/learn/model.hpp"

namespace affect::eval {

/// What a feature builder is asked for: fit every learned stage on `train`
/// (with `train_labels`) and transform both `train` and `eval`.
struct FeatureRequest {
    std::span<const std::size_t> train;
    std::span<const Label> train_labels;
    std::span<const std::size_t> eval;
};

struct FeatureSplit {
    Eigen::MatrixXd train;  // |train| x D
    Eigen::MatrixXd eval;   // |eval| x D
};

/// Must be safe to call concurrently from several folds.
using FeatureBuilder = std::function<FeatureSplit(const FeatureRequest&)>;

struct CvOptions {
    std::size_t folds = 4;
    std::uint64_t seed = 0;
    /// Unlabeled stories predicted by every fold model and fused by majority vote.
    std::vector<std::size_t> test_indices;
    std::string source = "cv";
};

struct FoldResult {
    std::size_t fold = 0;
    std::vector<std::size_t> held_out;
    learn::PredictionSet predictions;  // held-out stories
    learn::PredictionSet test_predictions;
    ConfusionMatrix confusion;
    double uar = 0.0;
    learn::TrainedModel model;
};

struct CvResult {
    FoldPlan plan;
    std::vector<FoldResult> folds;
    /// Out-of-fold predictions over every labeled story, in story order.
    learn::PredictionSet out_of_fold;
    std::vector<Label> truth;  // aligned with out_of_fold
    ConfusionMatrix confusion;
    double uar = 0.0;
    /// Fold models fused on the test stories (empty when there are none).
    learn::PredictionSet test_fused;
};

/// N-fold CV over the labeled stories of `data`. Every stage inside `features`
/// and the classifier is fit on the training folds only.
CvResult run_cv(const CvDataset& data, const FeatureBuilder& features, const learn::ModelSpec& model,
                const CvOptions& options);

struct NestedOptions {
    std::size_t outer_folds = 4;
    std::size_t inner_folds = 3;
    std::uint64_t seed = 0;
    std::string source = "nested";
};

struct OuterFoldResult {
    std::size_t fold = 0;
    std::size_t chosen = 0;  // index into the grid
    std::vector<double> inner_uar;  // per grid point
    learn::PredictionSet predictions;
    ConfusionMatrix confusion;
    double uar = 0.0;
};

struct NestedResult {
    std::vector<OuterFoldResult> folds;
    double mean_uar = 0.0;
    double pooled_uar = 0.0;
    learn::PredictionSet out_of_fold;
    std::size_t pre_scoring_reads = 0;
    std::size_t scoring_reads = 0;
};

/// Nested CV: inner CV on each outer-training portion selects the grid point
/// with the highest inner UAR (first on ties), which is refit on the whole
/// outer-training portion and scored on the outer-test fold. All labels are
/// read through an AuditedLabelStore whose outer-test stories are sealed.
/// Throws ConfigError for an empty grid.
NestedResult run_nested_cv(const CvDataset& data, const FeatureBuilder& features,
                           std::span<const learn::ModelSpec> grid, const NestedOptions& options);

/// Fuses fold-model predictions on the same stories: majority vote for three
/// or more, mean scores for fewer.
learn::PredictionSet fuse_fold_models(std::span<const learn::PredictionSet> sets, const ClassCounts& counts);

} // namespace affect::eval
