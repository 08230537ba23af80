#include "affect/text/stopwords.hpp"

#include "affect/common/csv.hpp"

namespace affect::text {

namespace {
#include "bundled_stopwords.inc"
} // namespace

StopWords StopWords::parse(std::string_view content) {
    StopWords out;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(start, end - start);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (!line.empty() && line.front() != '#') out.words_.insert(lowercase(line));
        start = end + 1;
    }
    return out;
}

StopWords StopWords::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

StopWords StopWords::bundled(Language lang) {
    return parse(lang == Language::En ? kBundledEnglish : kBundledGerman);
}

} // namespace affect::text
