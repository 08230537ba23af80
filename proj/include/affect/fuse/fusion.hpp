#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "affect/common/label.hpp"
#include "affect/eval/metrics.hpp"
#include "affect/learn/prediction.hpp"

namespace affect::fuse {

using learn::PredictionSet;

using eval::ConfusionMatrix;

struct FusionContext {
    LabelSet minority_set;
    ClassCounts class_counts{};
    /// Optional development-set confusion matrices, one per fused model.
    std::vector<ConfusionMatrix> dev_confusions;

    /// Context whose minority set is derived from the counts (strictly below max).
    static FusionContext from_counts(const ClassCounts& counts);
};

/// Two-set ordinal rule fusion of a majority-favouring set P and a
/// minority-favouring set S, per story:
///   P == S                   -> P
///   {P, S} == {L, H}         -> M
///   S in the minority set    -> S
///   otherwise                -> P
/// Output scores are the elementwise mean of the inputs (informational only).
PredictionSet fuse_two(const PredictionSet& p, const PredictionSet& s, const FusionContext& ctx);

/// Single-story form of fuse_two.
Label fuse_two_labels(Label p, Label s, const LabelSet& minority_set);

/// Plurality vote over three or more aligned sets. A full three-way split among
/// three voters yields M. Other ties pick, among the tied labels, the one with
/// the smallest class count; remaining ties go to M if tied, else the extreme
/// with the smaller count, else L.
PredictionSet majority_vote(std::span<const PredictionSet> sets, const FusionContext& ctx);

/// Mixes z-normalized scores with simplex weights. Each set is normalized with
/// one mean and standard deviation pooled over all of its scores on the
/// evaluation split, so a one-hot weight vector keeps that set's argmax.
PredictionSet weighted_score_fusion(std::span<const PredictionSet> sets, std::span<const double> weights,
                                    const ClassCounts& counts);

/// Grid search over the simplex at `step`, maximizing UAR against `truth`.
/// Ties go to the weight vector closest to uniform, then to the
/// lexicographically largest vector.
std::vector<double> search_fusion_weights(std::span<const PredictionSet> sets, std::span<const Label> truth,
                                          double step, const ClassCounts& counts);

/// All simplex points with coordinates in multiples of `step` (lexicographically descending).
std::vector<std::vector<double>> simplex_grid(std::size_t dims, double step);

/// Heuristic designation for fuse_two from development confusion matrices:
/// the set with higher mean recall over the minority classes becomes S.
/// Returns {index of P, index of S}.
std::pair<std::size_t, std::size_t> designate_majority_minority(const ConfusionMatrix& first,
                                                                const ConfusionMatrix& second,
                                                                const LabelSet& minority_set);

} // namespace affect::fuse
