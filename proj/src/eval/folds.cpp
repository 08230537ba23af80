#include "affect/eval/folds.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "affect/common/errors.hpp"

namespace affect::eval {

std::vector<std::size_t> CvDataset::labeled_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i]) out.push_back(i);
    return out;
}

std::vector<std::size_t> CvDataset::unlabeled_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!labels[i]) out.push_back(i);
    return out;
}

CvDataset CvDataset::from_corpus(const corpus::Corpus& corpus, Task task) {
    CvDataset data;
    for (const auto& story : corpus.stories()) {
        data.story_ids.push_back(story.story_id);
        data.speaker_ids.push_back(story.speaker_id);
        data.labels.push_back(story.label(task));
    }
    return data;
}

std::size_t FoldPlan::fold_of(const std::string& speaker_id) const {
    auto it = assignment.find(speaker_id);
    if (it == assignment.end()) throw DataError("speaker '" + speaker_id + "' is not part of the fold plan");
    return it->second;
}

std::vector<std::vector<std::size_t>> FoldPlan::partition(const CvDataset& data,
                                                          std::span<const std::size_t> indices) const {
    std::vector<std::vector<std::size_t>> folds(n_folds);
    for (std::size_t i : indices) folds[fold_of(data.speaker_ids[i])].push_back(i);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

FoldPlan plan_folds(const CvDataset& data, std::span<const std::size_t> indices, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ConfigError("number of folds must be at least 2, got " + std::to_string(n));

    std::map<std::string, ClassCounts> per_speaker;
    ClassCounts totals{};
    for (std::size_t i : indices) {
        if (!data.labels[i]) continue;
        const std::size_t c = index_of(*data.labels[i]);
        ++per_speaker[data.speaker_ids[i]][c];
        ++totals[c];
    }
    if (per_speaker.size() < n)
        throw DataError("cannot build " + std::to_string(n) + " speaker-disjoint folds from " +
                        std::to_string(per_speaker.size()) + " labeled speakers");

    std::vector<std::pair<std::string, ClassCounts>> speakers(per_speaker.begin(), per_speaker.end());
    std::mt19937_64 rng(seed);
    std::shuffle(speakers.begin(), speakers.end(), rng);
    auto story_total = [](const ClassCounts& c) { return c[0] + c[1] + c[2]; };
    std::stable_sort(speakers.begin(), speakers.end(),
                     [&](const auto& a, const auto& b) { return story_total(a.second) > story_total(b.second); });

    std::array<double, kNumClasses> target{};
    for (std::size_t c = 0; c < kNumClasses; ++c) target[c] = static_cast<double>(totals[c]) / static_cast<double>(n);

    FoldPlan plan;
    plan.n_folds = n;
    plan.seed = seed;
    std::vector<ClassCounts> fold_counts(n, ClassCounts{});
    std::vector<std::size_t> fold_speakers(n, 0);
    for (const auto& [speaker, counts] : speakers) {
        const std::size_t fewest = *std::min_element(fold_speakers.begin(), fold_speakers.end());
        std::size_t best = n;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < n; ++f) {
            if (fold_speakers[f] != fewest) continue;
            double cost = 0.0;
            for (std::size_t c = 0; c < kNumClasses; ++c) {
                const double d = static_cast<double>(fold_counts[f][c] + counts[c]) - target[c];
                cost += d * d;
            }
            if (cost < best_cost) {
                best_cost = cost;
                best = f;
            }
        }
        plan.assignment[speaker] = best;
        ++fold_speakers[best];
        for (std::size_t c = 0; c < kNumClasses; ++c) fold_counts[best][c] += counts[c];
    }
    return plan;
}

FoldPlan plan_folds(const CvDataset& data, std::size_t n, std::uint64_t seed) {
    const auto labeled = data.labeled_indices();
    return plan_folds(data, labeled, n, seed);
}

FoldPlan plan_folds(const corpus::Corpus& corpus, std::size_t n, Task task, std::uint64_t seed) {
    return plan_folds(CvDataset::from_corpus(corpus, task), n, seed);
}

} // namespace affect::eval
