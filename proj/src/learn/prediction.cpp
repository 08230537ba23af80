#include "affect/learn/prediction.hpp"

#include <cmath>
#include <unordered_map>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"

namespace affect::learn {

Label argmax_label(const Eigen::Ref<const Eigen::RowVectorXd>& scores, const ClassCounts& counts) {
    if (scores.size() != static_cast<Eigen::Index>(kNumClasses)) throw DataError("argmax_label: expected 3 scores");
    const double top = scores.maxCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(top));
    bool tied[3];
    for (int c = 0; c < 3; ++c) tied[c] = scores(c) >= top - tol;
    if (tied[index_of(Label::Medium)]) return Label::Medium;
    if (tied[index_of(Label::Low)] && tied[index_of(Label::High)])
        return counts[index_of(Label::High)] < counts[index_of(Label::Low)] ? Label::High : Label::Low;
    return tied[index_of(Label::Low)] ? Label::Low : Label::High;
}

void assign_labels(PredictionSet& set, const ClassCounts& counts) {
    set.labels.resize(static_cast<std::size_t>(set.scores.rows()));
    for (Eigen::Index i = 0; i < set.scores.rows(); ++i)
        set.labels[static_cast<std::size_t>(i)] = argmax_label(set.scores.row(i), counts);
}

void write_predictions_csv(const std::filesystem::path& path, const PredictionSet& set) {
    std::string out = "story_id,label,score_L,score_M,score_H,source\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out += csv_field(set.story_ids[i]) + ',' + to_char(set.labels[i]) + ',' + format_real(set.scores(r, 0)) + ',' +
               format_real(set.scores(r, 1)) + ',' + format_real(set.scores(r, 2)) + ',' + csv_field(set.source) + '\n';
    }
    write_text_file(path, out);
}

PredictionSet read_predictions_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header.empty()) throw DataError(path.string() + ": empty prediction file");
    const std::size_t c_id = table.column("story_id"), c_label = table.column("label"), c_l = table.column("score_L"),
                      c_m = table.column("score_M"), c_h = table.column("score_H"), c_src = table.column("source");
    PredictionSet set;
    set.scores.resize(static_cast<Eigen::Index>(table.rows.size()), 3);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = path.string() + ":" + std::to_string(table.line_numbers[r]);
        set.story_ids.push_back(row[c_id]);
        try {
            set.labels.push_back(parse_label(row[c_label]));
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        const auto i = static_cast<Eigen::Index>(r);
        set.scores(i, 0) = parse_real(row[c_l], where + " score_L");
        set.scores(i, 1) = parse_real(row[c_m], where + " score_M");
        set.scores(i, 2) = parse_real(row[c_h], where + " score_H");
        if (r == 0) set.source = row[c_src];
    }
    return set;
}

void require_aligned(const PredictionSet& a, const PredictionSet& b) {
    if (a.story_ids != b.story_ids)
        throw DataError("prediction sets '" + a.source + "' and '" + b.source + "' are not aligned on story ids");
}

PredictionSet align_to(const PredictionSet& set, const std::vector<std::string>& story_ids) {
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < set.size(); ++i) pos.emplace(set.story_ids[i], i);
    PredictionSet out;
    out.source = set.source;
    out.scores.resize(static_cast<Eigen::Index>(story_ids.size()), 3);
    for (std::size_t i = 0; i < story_ids.size(); ++i) {
        auto it = pos.find(story_ids[i]);
        if (it == pos.end()) throw DataError("prediction set '" + set.source + "' lacks story '" + story_ids[i] + "'");
        out.story_ids.push_back(story_ids[i]);
        out.labels.push_back(set.labels[it->second]);
        out.scores.row(static_cast<Eigen::Index>(i)) = set.scores.row(static_cast<Eigen::Index>(it->second));
    }
    return out;
}

} // namespace affect::learn
