#include "affect/text/lexicon.hpp"

#include <algorithm>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"

namespace affect::text {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Calls fn(line_number, line) for every line, with CR and a leading BOM removed.
template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
    if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
    std::size_t start = 0, line_no = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        fn(++line_no, line);
        start = end + 1;
    }
}

double parse_score(std::string_view s, const std::string& where) { return parse_real(trim(s), where); }

double mean_of(const std::vector<std::size_t>& idx, const std::vector<SentiWsEntry>& entries) {
    double sum = 0.0;
    for (std::size_t i : idx) sum += entries[i].score;
    return sum / static_cast<double>(idx.size());
}

} // namespace

std::optional<double> SentiWsLexicon::score(std::string_view surface) const {
    const std::string key = lowercase(surface);
    if (auto it = lemma_index.find(key); it != lemma_index.end()) return mean_of(it->second, entries);
    if (auto it = inflection_index.find(key); it != inflection_index.end()) return mean_of(it->second, entries);
    return std::nullopt;
}

SentiWsLexicon parse_sentiws(std::string_view content, Diagnostics* diag) {
    SentiWsLexicon lex;
    for_each_line(content, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty()) return;
        const std::string where = "SentiWS line " + std::to_string(line_no);
        const auto fields = split(line, '\t');
        if (fields.size() < 2 || fields.size() > 3) throw DataError(where + ": expected 2 or 3 tab-separated fields");
        const auto bar = fields[0].find('|');
        if (bar == std::string_view::npos || bar == 0 || bar + 1 == fields[0].size())
            throw DataError(where + ": expected 'Lemma|POS' in the first field");
        SentiWsEntry entry;
        entry.lemma = std::string(trim(fields[0].substr(0, bar)));
        entry.pos = std::string(trim(fields[0].substr(bar + 1)));
        entry.score = parse_score(fields[1], where);
        if (!(entry.score >= -1.0 && entry.score <= 1.0))
            throw DataError(where + ": score " + std::string(trim(fields[1])) + " outside [-1, 1]");
        if (fields.size() == 3)
            for (auto infl : split(fields[2], ','))
                if (auto t = trim(infl); !t.empty()) entry.inflections.emplace_back(t);

        const std::size_t id = lex.entries.size();
        lex.lemma_index[lowercase(entry.lemma)].push_back(id);
        for (const auto& infl : entry.inflections) {
            auto& ids = lex.inflection_index[lowercase(infl)];
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
        }
        lex.entries.push_back(std::move(entry));
    });
    if (lex.entries.empty()) warn(diag, "SentiWS lexicon is empty");
    return lex;
}

SentiWsLexicon load_sentiws(const std::filesystem::path& path, Diagnostics* diag) {
    return parse_sentiws(read_text_file(path), diag);
}

const std::vector<std::pair<double, double>>* SentiWordNetLexicon::find(std::string_view term, Pos pos) const {
    auto it = entries.find(std::pair<std::string, char>(std::string(term), pos_code(pos)));
    return it == entries.end() ? nullptr : &it->second;
}

SentiWordNetLexicon parse_sentiwordnet(std::string_view content, Diagnostics* diag) {
    SentiWordNetLexicon lex;
    for_each_line(content, [&](std::size_t line_no, std::string_view line) {
        if (trim(line).empty() || line.front() == '#') return;
        const std::string where = "SentiWordNet line " + std::to_string(line_no);
        const auto fields = split(line, '\t');
        if (fields.size() != 6)
            throw DataError(where + ": expected 6 tab-separated columns, found " + std::to_string(fields.size()));
        const auto pos_field = trim(fields[0]);
        const auto pos = pos_field.size() == 1 ? parse_pos_code(pos_field[0]) : std::nullopt;
        if (!pos) throw DataError(where + ": unknown POS '" + std::string(pos_field) + "'");
        const double p = parse_score(fields[2], where);
        const double n = parse_score(fields[3], where);
        if (!(p >= 0.0 && p <= 1.0) || !(n >= 0.0 && n <= 1.0)) throw DataError(where + ": score outside [0, 1]");
        for (auto term : split(trim(fields[4]), ' ')) {
            if (term.empty()) continue;
            const auto hash = term.rfind('#');
            std::string word = lowercase(hash == std::string_view::npos ? term : term.substr(0, hash));
            std::replace(word.begin(), word.end(), '_', ' ');
            if (word.empty()) throw DataError(where + ": empty synset term");
            lex.entries[{word, pos_code(*pos)}].emplace_back(p, n);
        }
    });
    if (lex.entries.empty()) warn(diag, "SentiWordNet lexicon is empty");
    return lex;
}

SentiWordNetLexicon load_sentiwordnet(const std::filesystem::path& path, Diagnostics* diag) {
    return parse_sentiwordnet(read_text_file(path), diag);
}

} // namespace affect::text
