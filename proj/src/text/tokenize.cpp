#include "affect/text/tokenize.hpp"

#include <array>
#include <cctype>

#include "affect/common/errors.hpp"

namespace affect::text {

std::string_view to_string(Language lang) { return lang == Language::De ? "de" : "en"; }

Language parse_language(std::string_view s) {
    if (s == "de") return Language::De;
    if (s == "en") return Language::En;
    throw ConfigError("unknown language '" + std::string(s) + "' (expected de or en)");
}

char pos_code(Pos pos) {
    switch (pos) {
    case Pos::Noun: return 'n';
    case Pos::Verb: return 'v';
    case Pos::Adjective: return 'a';
    case Pos::Adverb: return 'r';
    }
    return 'n';
}

std::optional<Pos> parse_pos_code(char c) {
    switch (c) {
    case 'n': return Pos::Noun;
    case 'v': return Pos::Verb;
    case 'a':
    case 's': return Pos::Adjective;
    case 'r': return Pos::Adverb;
    default: return std::nullopt;
    }
}

namespace {

/// Decodes one UTF-8 sequence at `pos`; returns the code point and its byte
/// length. Invalid bytes decode as themselves with length 1.
std::pair<char32_t, std::size_t> decode(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    auto cont = [&](std::size_t i) {
        return pos + i < s.size() && (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
    };
    auto bits = [&](std::size_t i) { return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F); };
    if (b0 < 0x80) return {b0, 1};
    if ((b0 & 0xE0) == 0xC0 && cont(1)) return {((b0 & 0x1F) << 6) | bits(1), 2};
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) return {((b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2), 3};
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
        return {((b0 & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) | bits(3), 4};
    return {b0, 1};
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
    if (cp <= 0xBF) return false;                  // Latin-1 punctuation, NBSP, guillemets
    if (cp == 0xD7 || cp == 0xF7) return false;    // multiplication and division signs
    if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation: dashes, quotes
    if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
    return true;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool ends_with_any(std::string_view s, std::initializer_list<std::string_view> suffixes, std::size_t min_stem) {
    for (auto suf : suffixes)
        if (s.size() >= suf.size() + min_stem && ends_with(s, suf)) return true;
    return false;
}

bool in_list(std::string_view w, std::initializer_list<std::string_view> list) {
    for (auto x : list)
        if (w == x) return true;
    return false;
}

bool starts_uppercase(std::string_view s) {
    if (s.empty()) return false;
    const auto b0 = static_cast<unsigned char>(s[0]);
    if (b0 < 0x80) return std::isupper(b0) != 0;
    const auto [cp, len] = decode(s, 0);
    return cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
}

} // namespace

std::string lowercase(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (std::size_t i = 0; i < word.size(); ++i) {
        const auto c = static_cast<unsigned char>(word[i]);
        if (c < 0x80) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == 0xC3 && i + 1 < word.size()) {
            auto n = static_cast<unsigned char>(word[i + 1]);
            if (n >= 0x80 && n <= 0x9E && n != 0x97) n = static_cast<unsigned char>(n + 0x20);
            out.push_back(static_cast<char>(c));
            out.push_back(static_cast<char>(n));
            ++i;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

Pos guess_pos(std::string_view surface, Language lang) {
    if (lang == Language::De) {
        if (starts_uppercase(surface)) return Pos::Noun;
        const std::string w = lowercase(surface);
        if (ends_with_any(w, {"lich", "ig", "isch", "bar", "sam", "haft", "los"}, 2)) return Pos::Adjective;
        if (ends_with_any(w, {"en", "ern", "eln"}, 2)) return Pos::Verb;
        return Pos::Adjective;
    }
    const std::string w = lowercase(surface);
    if (in_list(w, {"good", "bad", "happy", "sad", "great", "nice", "poor", "glad", "angry", "sorry", "fine", "old",
                    "new", "young", "little", "big", "small", "terrible", "awful", "proud", "calm", "warm", "cold"}))
        return Pos::Adjective;
    if (in_list(w, {"is", "am", "are", "was", "were", "be", "been", "have", "has", "had", "do", "does", "did", "go",
                    "went", "feel", "felt", "love", "hate", "like", "make", "made", "get", "got", "say", "said",
                    "see", "saw", "think", "know", "want", "miss", "enjoy", "fear", "hope"}))
        return Pos::Verb;
    if (in_list(w, {"very", "never", "always", "often", "not", "too", "again", "still", "also", "just"}))
        return Pos::Adverb;
    if (ends_with_any(w, {"ly"}, 3)) return Pos::Adverb;
    if (ends_with_any(w, {"ful", "ous", "ive", "able", "ible", "less", "ish", "ical", "ic"}, 2)) return Pos::Adjective;
    if (ends_with_any(w, {"ing", "ed", "ize", "ise", "ify"}, 2)) return Pos::Verb;
    return Pos::Noun;
}

TokenSeq tokenize(std::string_view text, Language lang, bool tag_pos) {
    TokenSeq out;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        Token t{current, std::nullopt};
        if (tag_pos) t.pos = guess_pos(current, lang);
        out.push_back(std::move(t));
        current.clear();
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const auto [cp, len] = decode(text, i);
        if (is_word_char(cp))
            current.append(text.substr(i, len));
        else
            flush();
        i += len;
    }
    flush();
    return out;
}

} // namespace affect::text
