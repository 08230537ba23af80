#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include "affect/text/tokenize.hpp"

namespace affect::text {

/// Lowercase stop-word list.
class StopWords {
public:
    StopWords() = default;

    /// One token per line; blank lines and lines starting with '#' are ignored.
    static StopWords parse(std::string_view content);
    static StopWords load(const std::filesystem::path& path);
    /// The list shipped with the library for `lang`.
    static StopWords bundled(Language lang);

    bool contains(std::string_view lowered) const { return words_.count(std::string(lowered)) != 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::set<std::string, std::less<>> words_;
};

} // namespace affect::text
