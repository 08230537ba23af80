#include "affect/corpus/corpus.hpp"

#include <set>
#include <sstream>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"

namespace affect::corpus {

namespace fs = std::filesystem;

Corpus::Corpus(std::vector<StoryRecord> stories) : stories_(std::move(stories)) { recompute(); }

void Corpus::recompute() {
    index_.clear();
    for (std::size_t i = 0; i < stories_.size(); ++i) {
        if (!index_.emplace(stories_[i].story_id, i).second)
            throw DataError("duplicate story_id '" + stories_[i].story_id + "'");
    }
    for (Task t : {Task::Valence, Task::Arousal}) {
        ClassCounts c{};
        for (const auto& s : stories_)
            if (auto l = s.label(t)) ++c[index_of(*l)];
        counts_[task_index(t)] = c;
        minority_[task_index(t)] = minority_from_counts(c);
    }
}

std::optional<std::size_t> Corpus::find(const std::string& story_id) const {
    auto it = index_.find(story_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> Corpus::labeled_indices(Task task) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < stories_.size(); ++i)
        if (stories_[i].label(task)) out.push_back(i);
    return out;
}

Corpus Corpus::subset(const std::vector<std::size_t>& indices) const {
    std::vector<StoryRecord> picked;
    picked.reserve(indices.size());
    for (std::size_t i : indices) picked.push_back(stories_.at(i));
    Corpus c(std::move(picked));
    c.sidecar_names_ = sidecar_names_;
    return c;
}

namespace {

const char* const kManifestColumns[] = {"story_id",           "speaker_id", "chunk_paths", "transcript_de_path",
                                        "transcript_en_path", "valence",    "arousal"};

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_relative()) path = base / path;
    return path.lexically_normal();
}

std::string rel(const fs::path& base, const fs::path& p) {
    if (p.empty()) return "";
    fs::path r = p.lexically_relative(base);
    return (r.empty() ? p : r).generic_string();
}

} // namespace

Corpus load_manifest(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("manifest not found: " + path.string());
    const CsvTable table = read_csv(path);
    if (table.header.empty()) throw DataError(path.string() + ": empty manifest");
    std::size_t col[7];
    for (int i = 0; i < 7; ++i) col[i] = table.column(kManifestColumns[i]);

    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::vector<StoryRecord> stories;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = path.string() + ":" + std::to_string(table.line_numbers[r]);
        auto field_error = [&](const std::string& field, const std::string& msg) {
            return DataError(where + ": field '" + field + "': " + msg);
        };

        StoryRecord s;
        s.story_id = row[col[0]];
        s.speaker_id = row[col[1]];
        if (s.story_id.empty()) throw field_error("story_id", "empty story id");
        if (s.speaker_id.empty()) throw field_error("speaker_id", "empty speaker id");
        if (!seen.insert(s.story_id).second) throw field_error("story_id", "duplicate story_id '" + s.story_id + "'");

        std::stringstream chunks(row[col[2]]);
        std::string chunk;
        while (std::getline(chunks, chunk, ';')) {
            if (chunk.empty()) continue;
            fs::path p = resolve(base, chunk);
            if (!fs::exists(p)) throw field_error("chunk_paths", "missing referenced chunk " + p.string());
            s.audio_chunks.push_back(std::move(p));
        }

        for (int t = 0; t < 2; ++t) {
            const std::string& name = kManifestColumns[3 + t];
            const std::string& value = row[col[3 + t]];
            if (value.empty()) continue;
            fs::path p = resolve(base, value);
            if (!fs::exists(p)) throw field_error(name, "missing transcript " + p.string());
            (t == 0 ? s.transcript_de_path : s.transcript_en_path) = p;
            (t == 0 ? s.transcript_de : s.transcript_en) = read_text_file(p);
        }

        try {
            s.valence = parse_optional_label(row[col[5]]);
        } catch (const DataError& e) {
            throw field_error("valence", e.what());
        }
        try {
            s.arousal = parse_optional_label(row[col[6]]);
        } catch (const DataError& e) {
            throw field_error("arousal", e.what());
        }
        if (s.valence.has_value() != s.arousal.has_value())
            throw field_error(s.valence ? "arousal" : "valence", "labeled rows need both valence and arousal");
        stories.push_back(std::move(s));
    }
    return Corpus(std::move(stories));
}

void write_manifest(const fs::path& path, const Corpus& corpus) {
    const fs::path base = (path.has_parent_path() ? path.parent_path() : fs::path(".")).lexically_normal();
    std::string out = "story_id,speaker_id,chunk_paths,transcript_de_path,transcript_en_path,valence,arousal\n";
    for (const auto& s : corpus.stories()) {
        std::string chunks;
        for (std::size_t i = 0; i < s.audio_chunks.size(); ++i) {
            if (i) chunks += ';';
            chunks += rel(base, s.audio_chunks[i]);
        }
        out += csv_field(s.story_id) + ',' + csv_field(s.speaker_id) + ',' + csv_field(chunks) + ',' +
               csv_field(rel(base, s.transcript_de_path)) + ',' + csv_field(rel(base, s.transcript_en_path)) + ',';
        if (s.valence) out += to_char(*s.valence);
        out += ',';
        if (s.arousal) out += to_char(*s.arousal);
        out += '\n';
    }
    write_text_file(path, out);
}

Corpus load_sidecar(const fs::path& path, Corpus corpus, Diagnostics* diag) {
    const CsvTable table = read_csv(path);
    if (table.header.empty() || table.rows.empty()) {
        warn(diag, path.string() + ": empty sidecar file; corpus unchanged");
        return corpus;
    }
    if (table.header.front() != "story_id") throw DataError(path.string() + ": first sidecar column must be story_id");
    std::vector<std::string> names(table.header.begin() + 1, table.header.end());
    if (names.empty()) throw DataError(path.string() + ": sidecar has no feature columns");
    if (!corpus.sidecar_names().empty() && corpus.sidecar_names() != names)
        throw DataError(path.string() + ": sidecar columns differ from previously loaded sidecar");
    corpus.set_sidecar_names(names);

    std::set<std::string> assigned;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = path.string() + ":" + std::to_string(table.line_numbers[r]);
        std::vector<double> values;
        for (std::size_t c = 1; c < row.size(); ++c)
            values.push_back(parse_real(row[c], where + " column '" + table.header[c] + "'"));
        auto idx = corpus.find(row[0]);
        if (!idx) {
            warn(diag, where + ": story_id '" + row[0] + "' not in corpus; skipped");
            continue;
        }
        if (!assigned.insert(row[0]).second)
            warn(diag, where + ": duplicate sidecar row for '" + row[0] + "'; last row wins");
        corpus.mutable_story(*idx).sidecar = std::move(values);
    }
    return corpus;
}

} // namespace affect::corpus
