#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affect/common/label.hpp"
#include "affect/eval/folds.hpp"

namespace affect::text {

struct SubsetSearchOptions {
    std::size_t max_size = 6;
    std::size_t folds = 4;
    std::uint64_t seed = 0;
    /// Ridge penalty of the scoring classifier (features are standardized).
    double lambda = 1.0;
};

struct SubsetSearchResult {
    std::vector<std::string> names;  // sorted
    double uar = 0.0;
    std::size_t evaluated = 0;
};

/// Exhaustive search over feature subsets of size 1..max_size, each scored by
/// the pooled out-of-fold UAR of a standardized ridge classifier on
/// speaker-disjoint folds of the stories in `rows`. Only the speaker ids of
/// `data` are used; `labels` is aligned with `rows`. Ties go to the smaller subset, then to the
/// lexicographically smaller list of sorted names.
/// `features` has one row per entry of `rows` and one column per name.
/// Throws ConfigError for an empty pool or max_size of zero.
SubsetSearchResult select_feature_subset(const Eigen::MatrixXd& features, std::span<const std::string> names,
                                         const eval::CvDataset& data, std::span<const std::size_t> rows,
                                         std::span<const Label> labels,
                                         const SubsetSearchOptions& options);

} // namespace affect::text
