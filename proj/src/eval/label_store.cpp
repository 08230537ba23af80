#include "affect/eval/label_store.hpp"

#include "affect/common/errors.hpp"

namespace affect::eval {

AuditedLabelStore::AuditedLabelStore(std::vector<std::optional<Label>> labels)
    : labels_(std::move(labels)), owner_(labels_.size(), kUnsealed) {}

void AuditedLabelStore::seal(std::size_t fold, std::span<const std::size_t> indices) {
    for (std::size_t i : indices) {
        if (i >= owner_.size()) throw DataError("label store: index out of range");
        if (owner_[i] != kUnsealed) throw ConfigError("label store: story sealed twice");
        owner_[i] = fold;
    }
}

Label AuditedLabelStore::FoldAccess::label(std::size_t i) const {
    AuditedLabelStore& s = *store_;
    if (i >= s.labels_.size()) throw DataError("label store: index out of range");
    ++s.total_reads_;
    if (s.owner_[i] == fold_) {
        if (scoring_)
            ++s.scoring_reads_;
        else
            ++s.pre_scoring_reads_;
    }
    if (!s.labels_[i]) throw DataError("label store: story " + std::to_string(i) + " is unlabeled");
    return *s.labels_[i];
}

std::vector<Label> AuditedLabelStore::FoldAccess::labels(std::span<const std::size_t> indices) const {
    std::vector<Label> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(label(i));
    return out;
}

} // namespace affect::eval
