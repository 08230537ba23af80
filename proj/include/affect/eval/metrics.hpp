#pragma once

#include <span>
#include <string>

#include "affect/common/label.hpp"

namespace affect::eval {

/// 3 x 3 counts; rows are truth (L, M, H), columns are predictions.
struct ConfusionMatrix {
    std::array<std::array<long, 3>, 3> counts{};

    long& at(Label truth, Label pred) { return counts[index_of(truth)][index_of(pred)]; }
    long at(Label truth, Label pred) const { return counts[index_of(truth)][index_of(pred)]; }
    long row_total(Label truth) const;
    long total() const;
    /// Recall of `truth`; nullopt when the row is empty.
    std::optional<double> recall(Label truth) const;
    /// trace / total.
    double accuracy() const;
    std::string to_csv() const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws DataError on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> pred);

/// Unweighted average recall over the classes present in `truth`.
double uar(std::span<const Label> truth, std::span<const Label> pred);
double uar(const ConfusionMatrix& cm);

} // namespace affect::eval
