#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "affect/text/stopwords.hpp"
#include "affect/text/tokenize.hpp"

namespace affect::text {

struct TfidfOptions {
    /// Porter-stem tokens (English only).
    bool stem = true;
    /// 1 + ln(tf) instead of raw counts.
    bool sublinear_tf = false;
};

struct TfidfModel {
    Language language = Language::En;
    TfidfOptions options;
    StopWords stop_words;
    std::vector<std::string> vocabulary;  // sorted
    std::unordered_map<std::string, std::size_t> index;
    Eigen::VectorXd idf;
    std::size_t documents = 0;

    std::size_t dim() const { return vocabulary.size(); }
};

/// Uni-grams and space-joined bi-grams of the lowercased tokens left after
/// stop-word removal, stemmed for English when enabled.
std::vector<std::string> tfidf_terms(const TokenSeq& doc, Language lang, const StopWords& stop_words, bool stem);

/// Vocabulary of all training n-grams with idf = ln((1 + N) / (1 + df)) + 1.
/// Throws DataError when the vocabulary is empty.
TfidfModel fit_tfidf(std::span<const TokenSeq> docs, Language lang, StopWords stop_words, TfidfOptions options = {});

/// Term counts times idf, L2-normalized. Unknown n-grams are ignored; a
/// document without known terms maps to the zero vector.
Eigen::VectorXd tfidf_transform(const TfidfModel& model, const TokenSeq& doc);

} // namespace affect::text
