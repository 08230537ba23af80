#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affect/common/label.hpp"

namespace affect::learn {

/// Per-story labels and per-class decision values (columns L, M, H) from one model.
struct PredictionSet {
    std::vector<std::string> story_ids;
    std::vector<Label> labels;
    Eigen::MatrixXd scores;  // n x 3
    std::string source;

    std::size_t size() const { return story_ids.size(); }
};

/// Argmax over (L, M, H) scores. Entries within 1e-12 (relative) of the
/// maximum tie. Ties prefer M; an L/H tie goes to the extreme with the smaller
/// count in `counts`, and to L when those counts are equal.
Label argmax_label(const Eigen::Ref<const Eigen::RowVectorXd>& scores, const ClassCounts& counts);

/// Fills `labels` from `scores` with argmax_label.
void assign_labels(PredictionSet& set, const ClassCounts& counts);

/// CSV: story_id,label,score_L,score_M,score_H,source
void write_predictions_csv(const std::filesystem::path& path, const PredictionSet& set);
PredictionSet read_predictions_csv(const std::filesystem::path& path);

/// Throws DataError unless both sets list the same story ids in the same order.
void require_aligned(const PredictionSet& a, const PredictionSet& b);

/// Reorders `set` to follow `story_ids`; throws DataError on missing ids.
PredictionSet align_to(const PredictionSet& set, const std::vector<std::string>& story_ids);

} // namespace affect::learn
