#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affect/common/label.hpp"
#include "affect/corpus/corpus.hpp"

namespace affect::eval {

/// Story-level view of a corpus for one task. Indices into these vectors are
/// the story indices used throughout cross-validation.
struct CvDataset {
    std::vector<std::string> story_ids;
    std::vector<std::string> speaker_ids;
    std::vector<std::optional<Label>> labels;

    std::size_t size() const { return story_ids.size(); }
    std::vector<std::size_t> labeled_indices() const;
    std::vector<std::size_t> unlabeled_indices() const;

    static CvDataset from_corpus(const corpus::Corpus& corpus, Task task);
};

/// Speaker-to-fold assignment.
struct FoldPlan {
    std::size_t n_folds = 0;
    std::map<std::string, std::size_t> assignment;
    std::uint64_t seed = 0;

    /// Throws DataError for a speaker that is not in the plan.
    std::size_t fold_of(const std::string& speaker_id) const;
    /// Held-out story indices per fold (ascending), restricted to `indices`.
    std::vector<std::vector<std::size_t>> partition(const CvDataset& data, std::span<const std::size_t> indices) const;
};

/// Seeded greedy stratified assignment at speaker granularity over the
/// labeled stories in `indices`. Speakers are shuffled, then placed largest
/// first; each goes to one of the folds holding the fewest speakers, choosing
/// the fold whose class counts end up closest (squared deviation) to the
/// per-fold target, lowest index on ties.
/// Throws ConfigError when n < 2 and DataError when there are fewer labeled
/// speakers than folds.
FoldPlan plan_folds(const CvDataset& data, std::span<const std::size_t> indices, std::size_t n, std::uint64_t seed);

/// Plan over all labeled stories.
FoldPlan plan_folds(const CvDataset& data, std::size_t n, std::uint64_t seed);

FoldPlan plan_folds(const corpus::Corpus& corpus, std::size_t n, Task task, std::uint64_t seed);

} // namespace affect::eval
