#include <algorithm>

#include "affect/text/lexicon.hpp"

namespace affect::text {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

/// stem, stem with a doubled final consonant undone, stem + "e".
void add_stem_forms(std::string stem, std::vector<std::string>& out) {
    if (stem.size() < 2) return;
    out.push_back(stem);
    const std::size_t n = stem.size();
    if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1])) out.push_back(stem.substr(0, n - 1));
    out.push_back(stem + "e");
}

} // namespace

std::vector<std::string> lemma_candidates(std::string_view word) {
    std::vector<std::string> out;
    const std::string w(word);
    const std::size_t n = w.size();
    if (ends_with(w, "ies") && n > 4) out.push_back(w.substr(0, n - 3) + "y");
    if (ends_with(w, "es") && n > 3) out.push_back(w.substr(0, n - 2));
    if (ends_with(w, "s") && !ends_with(w, "ss") && n > 2) out.push_back(w.substr(0, n - 1));
    if (ends_with(w, "ing") && n > 5) add_stem_forms(w.substr(0, n - 3), out);
    if (ends_with(w, "ied") && n > 4) out.push_back(w.substr(0, n - 3) + "y");
    if (ends_with(w, "ed") && n > 4) add_stem_forms(w.substr(0, n - 2), out);
    if (ends_with(w, "est") && n > 5) add_stem_forms(w.substr(0, n - 3), out);
    if (ends_with(w, "er") && n > 4) add_stem_forms(w.substr(0, n - 2), out);

    std::vector<std::string> unique;
    for (auto& c : out)
        if (c != w && std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(std::move(c));
    return unique;
}

} // namespace affect::text
