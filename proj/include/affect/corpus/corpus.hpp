#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "affect/common/diagnostics.hpp"
#include "affect/common/label.hpp"

namespace affect::corpus {

/// One narrative with its audio chunks, transcripts and (optional) labels.
struct StoryRecord {
    std::string story_id;
    std::string speaker_id;
    std::vector<std::filesystem::path> audio_chunks;  // ordered by chunk index
    std::filesystem::path transcript_de_path;
    std::filesystem::path transcript_en_path;
    std::string transcript_de;
    std::string transcript_en;
    std::optional<Label> valence;
    std::optional<Label> arousal;
    /// Aligned with Corpus::sidecar_names; empty when the story has no sidecar row.
    std::vector<double> sidecar;

    std::optional<Label> label(Task task) const { return task == Task::Valence ? valence : arousal; }
    bool labeled() const { return valence.has_value(); }

    friend bool operator==(const StoryRecord&, const StoryRecord&) = default;
};

class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<StoryRecord> stories);

    const std::vector<StoryRecord>& stories() const { return stories_; }
    std::size_t size() const { return stories_.size(); }
    const StoryRecord& operator[](std::size_t i) const { return stories_[i]; }

    /// Index of `story_id`, or nullopt.
    std::optional<std::size_t> find(const std::string& story_id) const;

    const ClassCounts& class_counts(Task task) const { return counts_[task_index(task)]; }
    const LabelSet& minority_set(Task task) const { return minority_[task_index(task)]; }

    const std::vector<std::string>& sidecar_names() const { return sidecar_names_; }

    /// Indices of stories labeled for `task`, in corpus order.
    std::vector<std::size_t> labeled_indices(Task task) const;

    /// Sub-corpus with the given stories (statistics recomputed).
    Corpus subset(const std::vector<std::size_t>& indices) const;

    // Mutation used by the sidecar loader.
    StoryRecord& mutable_story(std::size_t i) { return stories_[i]; }
    void set_sidecar_names(std::vector<std::string> names) { sidecar_names_ = std::move(names); }

private:
    static std::size_t task_index(Task t) { return t == Task::Valence ? 0 : 1; }
    void recompute();

    std::vector<StoryRecord> stories_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> sidecar_names_;
    ClassCounts counts_[2]{};
    LabelSet minority_[2];
};

/// Loads the manifest CSV
///   story_id,speaker_id,chunk_paths,transcript_de_path,transcript_en_path,valence,arousal
/// Relative paths resolve against the manifest's directory. Chunk and transcript
/// files must exist; transcripts are read into the record.
/// Errors (DataError) name the row and field: missing file, duplicate story_id,
/// unknown label token, missing referenced chunk, half-labeled row.
Corpus load_manifest(const std::filesystem::path& path);

/// Writes a manifest that load_manifest reads back into identical records.
/// Paths are written relative to the manifest's directory when possible.
void write_manifest(const std::filesystem::path& path, const Corpus& corpus);

/// Attaches sidecar features from `story_id,<name>...`. Unknown story ids are
/// skipped with a warning; duplicate rows are last-write-wins with a warning;
/// an empty file leaves the corpus unchanged (warning); non-numeric cells throw.
Corpus load_sidecar(const std::filesystem::path& path, Corpus corpus, Diagnostics* diag = nullptr);

} // namespace affect::corpus
