#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "affect/text/lexicon.hpp"
#include "affect/text/tokenize.hpp"

namespace affect::text {

/// A named group of features, e.g. "sentiws" with "min", "max", ...
struct FeatureBlock {
    std::string name;
    std::vector<std::string> feature_names;
    std::vector<double> values;

    /// "block.feature"
    std::vector<std::string> qualified_names() const;
};

/// Concatenation of blocks in insertion order.
struct FeatureVector {
    std::vector<FeatureBlock> blocks;

    void add(FeatureBlock block) { blocks.push_back(std::move(block)); }
    std::size_t total_dim() const;
    std::vector<double> values() const;
    std::vector<std::string> names() const;
};

/// min, max, range, mean, sum of `scores`; all zero for an empty sequence.
std::array<double, 5> summary_statistics(std::span<const double> scores);

/// SentiWS block: min, max, range, mean, sum, n_pos, n_neg over the scores of
/// the tokens found in the lexicon.
FeatureBlock sentiws_features(const SentiWsLexicon& lexicon, const TokenSeq& doc);

/// SentiWordNet block: pos_{min,max,range,mean,sum,count} followed by the
/// same six for neg_. Tokens are looked up by (surface, POS), then by their
/// lemma candidates with the same POS; the synset scores of a hit are
/// averaged. Untagged tokens are treated as nouns.
FeatureBlock sentiwordnet_features(const SentiWordNetLexicon& lexicon, const TokenSeq& doc);

/// Qualified names of the 7 SentiWS and 12 SentiWordNet features.
std::vector<std::string> dictionary_feature_names();

/// The five-feature reference subset: maximum positive and sum of negative
/// SentiWordNet scores; minimum, maximum and number of negative SentiWS scores.
std::vector<std::string> reference_dictionary_subset();

} // namespace affect::text
