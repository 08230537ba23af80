#include "affect/common/label.hpp"

#include <algorithm>

#include "affect/common/errors.hpp"

namespace affect {

char to_char(Label l) {
    switch (l) {
        case Label::Low: return 'L';
        case Label::Medium: return 'M';
        case Label::High: return 'H';
    }
    return '?';
}

Label parse_label(std::string_view token) {
    if (token == "L") return Label::Low;
    if (token == "M") return Label::Medium;
    if (token == "H") return Label::High;
    throw DataError("unknown label '" + std::string(token) + "' (expected L, M or H)");
}

std::optional<Label> parse_optional_label(std::string_view token) {
    if (token.empty()) return std::nullopt;
    return parse_label(token);
}

std::string_view to_string(Task t) { return t == Task::Valence ? "valence" : "arousal"; }

Task parse_task(std::string_view s) {
    if (s == "valence") return Task::Valence;
    if (s == "arousal") return Task::Arousal;
    throw ConfigError("unknown task '" + std::string(s) + "' (expected valence or arousal)");
}

std::size_t LabelSet::size() const {
    std::size_t n = 0;
    for (Label l : kAllLabels) n += contains(l) ? 1 : 0;
    return n;
}

std::string LabelSet::to_string() const {
    std::string out;
    for (Label l : kAllLabels)
        if (contains(l)) out.push_back(to_char(l));
    return out;
}

LabelSet LabelSet::parse(std::string_view s) {
    LabelSet set;
    for (char c : s) set.insert(parse_label(std::string_view(&c, 1)));
    return set;
}

LabelSet minority_from_counts(const ClassCounts& counts) {
    const std::size_t top = *std::max_element(counts.begin(), counts.end());
    LabelSet set;
    for (Label l : kAllLabels)
        if (counts[index_of(l)] < top) set.insert(l);
    return set;
}

} // namespace affect
