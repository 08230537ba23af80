#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "affect/common/label.hpp"

namespace affect::eval {

/// Label store that records who reads what. Each story may be sealed to one
/// outer fold; reads of a sealed story through that fold's access handle
/// before the handle is opened for scoring are counted as violations.
class AuditedLabelStore {
public:
    explicit AuditedLabelStore(std::vector<std::optional<Label>> labels);

    class FoldAccess {
    public:
        /// Label of story `i`. Throws DataError for an unlabeled story.
        Label label(std::size_t i) const;
        std::vector<Label> labels(std::span<const std::size_t> indices) const;
        /// After this call reads of the fold's sealed stories are legitimate.
        void open_for_scoring() { scoring_ = true; }
        bool scoring() const { return scoring_; }
        std::size_t fold() const { return fold_; }

    private:
        friend class AuditedLabelStore;
        FoldAccess(AuditedLabelStore* store, std::size_t fold) : store_(store), fold_(fold) {}
        AuditedLabelStore* store_;
        std::size_t fold_;
        bool scoring_ = false;
    };

    /// Seals `indices` to `fold`. A story can be sealed only once.
    void seal(std::size_t fold, std::span<const std::size_t> indices);
    FoldAccess access(std::size_t fold) { return FoldAccess(this, fold); }

    /// Reads of sealed stories by their own fold before scoring was opened.
    std::size_t pre_scoring_reads() const { return pre_scoring_reads_.load(); }
    /// Reads of sealed stories by their own fold after scoring was opened.
    std::size_t scoring_reads() const { return scoring_reads_.load(); }
    std::size_t total_reads() const { return total_reads_.load(); }
    std::size_t size() const { return labels_.size(); }

private:
    static constexpr std::size_t kUnsealed = static_cast<std::size_t>(-1);
    std::vector<std::optional<Label>> labels_;
    std::vector<std::size_t> owner_;
    std::atomic<std::size_t> pre_scoring_reads_{0};
    std::atomic<std::size_t> scoring_reads_{0};
    std::atomic<std::size_t> total_reads_{0};
};

} // namespace affect::eval
