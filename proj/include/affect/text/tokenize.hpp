#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affect::text {

enum class Language { De, En };

std::string_view to_string(Language lang);
/// "de" or "en"; throws ConfigError otherwise.
Language parse_language(std::string_view s);

/// Coarse part of speech, coded as in SentiWordNet: n, v, a, r.
enum class Pos { Noun, Verb, Adjective, Adverb };

char pos_code(Pos pos);
/// Maps n, v, a, s (satellite adjective) and r; nullopt for anything else.
std::optional<Pos> parse_pos_code(char c);

struct Token {
    std::string surface;  // original case
    std::optional<Pos> pos;

    friend bool operator==(const Token&, const Token&) = default;
};

using TokenSeq = std::vector<Token>;

/// Splits on whitespace and punctuation. Letters, digits and all bytes of
/// multi-byte UTF-8 sequences belong to words; every other ASCII byte is a
/// separator. With `tag_pos` each token gets a heuristic POS tag.
TokenSeq tokenize(std::string_view text, Language lang, bool tag_pos = false);

/// ASCII lowercasing plus the German capitals Ä, Ö and Ü in UTF-8.
std::string lowercase(std::string_view word);

/// Suffix-rule tagger: adverbs, adjectives and verbs by ending, nouns otherwise.
/// German text is tagged by capitalization (capitalized words are nouns).
Pos guess_pos(std::string_view surface, Language lang);

} // namespace affect::text
