#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affect/common/diagnostics.hpp"
#include "affect/text/tokenize.hpp"

namespace affect::text {

struct SentiWsEntry {
    std::string lemma;
    std::string pos;  // e.g. NN, ADJX, VVINF
    double score = 0.0;
    std::vector<std::string> inflections;
};

/// German polarity lexicon. Lookup keys are lowercased.
struct SentiWsLexicon {
    std::vector<SentiWsEntry> entries;
    std::map<std::string, std::vector<std::size_t>, std::less<>> lemma_index;
    std::map<std::string, std::vector<std::size_t>, std::less<>> inflection_index;

    /// Lemma lookup first, then the inflection lists; several matches are
    /// averaged. nullopt when the word is unknown.
    std::optional<double> score(std::string_view surface) const;
    std::size_t size() const { return entries.size(); }
};

/// Lines "Lemma|POS<TAB>score[<TAB>infl1,infl2,...]". Malformed lines and
/// scores outside [-1, 1] are DataErrors with the line number. An empty file
/// gives an empty lexicon with a warning.
SentiWsLexicon parse_sentiws(std::string_view content, Diagnostics* diag = nullptr);
SentiWsLexicon load_sentiws(const std::filesystem::path& path, Diagnostics* diag = nullptr);

/// English lexicon: every synset score pair per (term, POS).
struct SentiWordNetLexicon {
    std::map<std::pair<std::string, char>, std::vector<std::pair<double, double>>, std::less<>> entries;

    /// Synset (positive, negative) pairs for a lowercased term, or nullptr.
    const std::vector<std::pair<double, double>>* find(std::string_view term, Pos pos) const;
    std::size_t size() const { return entries.size(); }
};

/// SentiWordNet 3.0 TSV: POS, ID, PosScore, NegScore, SynsetTerms ("term#sense"
/// separated by spaces), Gloss. Lines starting with '#' are comments. Satellite
/// adjectives ('s') are stored as adjectives and underscores in terms become
/// spaces. Wrong column counts and out-of-range scores are DataErrors.
SentiWordNetLexicon parse_sentiwordnet(std::string_view content, Diagnostics* diag = nullptr);
SentiWordNetLexicon load_sentiwordnet(const std::filesystem::path& path, Diagnostics* diag = nullptr);

/// Candidate base forms of a lowercased English word, most specific first:
/// plural (-ies, -es, -s), progressive (-ing) and past (-ied, -ed) endings,
/// with consonant doubling undone and a final 'e' restored. The word itself
/// is not included.
std::vector<std::string> lemma_candidates(std::string_view word);

} // namespace affect::text
