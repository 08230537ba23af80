#include <algorithm>

#include "affect/text/features.hpp"

namespace affect::text {

std::vector<std::string> FeatureBlock::qualified_names() const {
    std::vector<std::string> out;
    out.reserve(feature_names.size());
    for (const auto& f : feature_names) out.push_back(name + "." + f);
    return out;
}

std::size_t FeatureVector::total_dim() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.values.size();
    return n;
}

std::vector<double> FeatureVector::values() const {
    std::vector<double> out;
    for (const auto& b : blocks) out.insert(out.end(), b.values.begin(), b.values.end());
    return out;
}

std::vector<std::string> FeatureVector::names() const {
    std::vector<std::string> out;
    for (const auto& b : blocks) {
        const auto q = b.qualified_names();
        out.insert(out.end(), q.begin(), q.end());
    }
    return out;
}

std::array<double, 5> summary_statistics(std::span<const double> scores) {
    if (scores.empty()) return {0.0, 0.0, 0.0, 0.0, 0.0};
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += s;
    return {*lo, *hi, *hi - *lo, sum / static_cast<double>(scores.size()), sum};
}

FeatureBlock sentiws_features(const SentiWsLexicon& lexicon, const TokenSeq& doc) {
    std::vector<double> scores;
    for (const auto& tok : doc)
        if (auto s = lexicon.score(tok.surface)) scores.push_back(*s);
    const auto stats = summary_statistics(scores);
    const auto n_pos = std::count_if(scores.begin(), scores.end(), [](double s) { return s > 0.0; });
    const auto n_neg = std::count_if(scores.begin(), scores.end(), [](double s) { return s < 0.0; });
    FeatureBlock block;
    block.name = "sentiws";
    block.feature_names = {"min", "max", "range", "mean", "sum", "n_pos", "n_neg"};
    block.values = {stats[0], stats[1], stats[2], stats[3], stats[4], static_cast<double>(n_pos),
                    static_cast<double>(n_neg)};
    return block;
}

FeatureBlock sentiwordnet_features(const SentiWordNetLexicon& lexicon, const TokenSeq& doc) {
    std::vector<double> pos_scores, neg_scores;
    for (const auto& tok : doc) {
        const Pos pos = tok.pos.value_or(Pos::Noun);
        const std::string word = lowercase(tok.surface);
        const auto* synsets = lexicon.find(word, pos);
        if (!synsets) {
            for (const auto& lemma : lemma_candidates(word))
                if ((synsets = lexicon.find(lemma, pos))) break;
        }
        if (!synsets) continue;
        double p = 0.0, n = 0.0;
        for (const auto& [sp, sn] : *synsets) {
            p += sp;
            n += sn;
        }
        pos_scores.push_back(p / static_cast<double>(synsets->size()));
        neg_scores.push_back(n / static_cast<double>(synsets->size()));
    }
    FeatureBlock block;
    block.name = "swn";
    for (const auto& [prefix, scores] : {std::pair{"pos_", &pos_scores}, std::pair{"neg_", &neg_scores}}) {
        const auto stats = summary_statistics(*scores);
        for (const char* f : {"min", "max", "range", "mean", "sum", "count"}) block.feature_names.push_back(prefix + std::string(f));
        block.values.insert(block.values.end(), stats.begin(), stats.end());
        block.values.push_back(static_cast<double>(scores->size()));
    }
    return block;
}

std::vector<std::string> dictionary_feature_names() {
    FeatureVector v;
    v.add(sentiws_features({}, {}));
    v.add(sentiwordnet_features({}, {}));
    return v.names();
}

std::vector<std::string> reference_dictionary_subset() {
    return {"swn.pos_max", "swn.neg_sum", "sentiws.min", "sentiws.max", "sentiws.n_neg"};
}

} // namespace affect::text
