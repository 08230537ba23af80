#include "affect/text/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "affect/common/errors.hpp"
#include "affect/text/porter.hpp"

namespace affect::text {

namespace {

bool is_ascii(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

} // namespace

std::vector<std::string> tfidf_terms(const TokenSeq& doc, Language lang, const StopWords& stop_words, bool stem) {
    std::vector<std::string> words;
    for (const auto& tok : doc) {
        std::string w = lowercase(tok.surface);
        if (stop_words.contains(w)) continue;
        if (stem && lang == Language::En && is_ascii(w)) w = porter_stem(w);
        words.push_back(std::move(w));
    }
    std::vector<std::string> terms = words;
    for (std::size_t i = 1; i < words.size(); ++i) terms.push_back(words[i - 1] + " " + words[i]);
    return terms;
}

TfidfModel fit_tfidf(std::span<const TokenSeq> docs, Language lang, StopWords stop_words, TfidfOptions options) {
    if (docs.empty()) throw DataError("TF-IDF needs at least one training document");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        const auto terms = tfidf_terms(doc, lang, stop_words, options.stem);
        for (const auto& t : std::set<std::string>(terms.begin(), terms.end())) ++df[t];
    }
    if (df.empty()) throw DataError("TF-IDF vocabulary is empty (all training documents are empty)");

    TfidfModel model;
    model.language = lang;
    model.options = options;
    model.stop_words = std::move(stop_words);
    model.documents = docs.size();
    model.idf.resize(static_cast<Eigen::Index>(df.size()));
    const double n = static_cast<double>(docs.size());
    for (const auto& [term, count] : df) {
        const std::size_t i = model.vocabulary.size();
        model.index.emplace(term, i);
        model.vocabulary.push_back(term);
        model.idf[static_cast<Eigen::Index>(i)] = std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0;
    }
    return model;
}

Eigen::VectorXd tfidf_transform(const TfidfModel& model, const TokenSeq& doc) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dim()));
    for (const auto& t : tfidf_terms(doc, model.language, model.stop_words, model.options.stem)) {
        auto it = model.index.find(t);
        if (it != model.index.end()) v[static_cast<Eigen::Index>(it->second)] += 1.0;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        const double tf = model.options.sublinear_tf ? 1.0 + std::log(v[i]) : v[i];
        v[i] = tf * model.idf[i];
    }
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

} // namespace affect::text
