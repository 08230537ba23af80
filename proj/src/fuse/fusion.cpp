#include "affect/fuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "affect/common/errors.hpp"

namespace affect::fuse {

FusionContext FusionContext::from_counts(const ClassCounts& counts) {
    FusionContext ctx;
    ctx.class_counts = counts;
    ctx.minority_set = minority_from_counts(counts);
    return ctx;
}

Label fuse_two_labels(Label p, Label s, const LabelSet& minority_set) {
    if (p == s) return p;
    if (opposite_extremes(p, s)) return Label::Medium;
    if (minority_set.contains(s)) return s;
    return p;
}

PredictionSet fuse_two(const PredictionSet& p, const PredictionSet& s, const FusionContext& ctx) {
    learn::require_aligned(p, s);
    PredictionSet out;
    out.story_ids = p.story_ids;
    out.source = "fuse_two(" + p.source + "," + s.source + ")";
    out.scores = 0.5 * (p.scores + s.scores);
    out.labels.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out.labels.push_back(fuse_two_labels(p.labels[i], s.labels[i], ctx.minority_set));
    return out;
}

namespace {

Label resolve_vote(const std::array<int, 3>& votes, std::size_t voters, const ClassCounts& counts) {
    const int top = *std::max_element(votes.begin(), votes.end());
    std::vector<Label> tied;
    for (Label l : kAllLabels)
        if (votes[index_of(l)] == top) tied.push_back(l);
    if (tied.size() == 1) return tied.front();
    if (voters == 3 && tied.size() == 3) return Label::Medium;

    std::size_t rarest = counts[index_of(tied.front())];
    for (Label l : tied) rarest = std::min(rarest, counts[index_of(l)]);
    std::vector<Label> rare;
    for (Label l : tied)
        if (counts[index_of(l)] == rarest) rare.push_back(l);
    if (rare.size() == 1) return rare.front();
    if (std::find(rare.begin(), rare.end(), Label::Medium) != rare.end()) return Label::Medium;
    // Only L and H remain, with equal counts.
    return Label::Low;
}

} // namespace

PredictionSet majority_vote(std::span<const PredictionSet> sets, const FusionContext& ctx) {
    if (sets.size() < 3) throw ConfigError("majority_vote needs at least three prediction sets (use fuse_two for two)");
    for (std::size_t m = 1; m < sets.size(); ++m) learn::require_aligned(sets[0], sets[m]);

    PredictionSet out;
    out.story_ids = sets[0].story_ids;
    out.source = "majority_vote(" + std::to_string(sets.size()) + ")";
    out.scores = Eigen::MatrixXd::Zero(sets[0].scores.rows(), 3);
    for (const auto& s : sets) out.scores += s.scores;
    out.scores /= static_cast<double>(sets.size());
    for (std::size_t i = 0; i < out.story_ids.size(); ++i) {
        std::array<int, 3> votes{};
        for (const auto& s : sets) ++votes[index_of(s.labels[i])];
        out.labels.push_back(resolve_vote(votes, sets.size(), ctx.class_counts));
    }
    return out;
}

PredictionSet weighted_score_fusion(std::span<const PredictionSet> sets, std::span<const double> weights,
                                    const ClassCounts& counts) {
    if (sets.empty()) throw ConfigError("weighted_score_fusion: no prediction sets");
    if (weights.size() != sets.size())
        throw ConfigError("weighted_score_fusion: " + std::to_string(weights.size()) + " weights for " +
                          std::to_string(sets.size()) + " prediction sets");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("weighted_score_fusion: weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("weighted_score_fusion: weights must sum to one");
    for (std::size_t m = 1; m < sets.size(); ++m) learn::require_aligned(sets[0], sets[m]);

    PredictionSet out;
    out.story_ids = sets[0].story_ids;
    out.source = "weighted_score_fusion";
    out.scores = Eigen::MatrixXd::Zero(sets[0].scores.rows(), 3);
    for (std::size_t m = 0; m < sets.size(); ++m) {
        if (weights[m] == 0.0) continue;
        const Eigen::MatrixXd& s = sets[m].scores;
        const double mean = s.mean();
        const double var = (s.array() - mean).square().mean();
        const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        out.scores += weights[m] * ((s.array() - mean) / sd).matrix();
    }
    learn::assign_labels(out, counts);
    return out;
}

std::vector<std::vector<double>> simplex_grid(std::size_t dims, double step) {
    if (dims == 0) throw ConfigError("simplex_grid: empty grid (no prediction sets)");
    if (!(step > 0.0) || step > 1.0) throw ConfigError("simplex_grid: step must lie in (0, 1]");
    const long parts = std::lround(1.0 / step);
    if (std::abs(static_cast<double>(parts) * step - 1.0) > 1e-9) throw ConfigError("simplex_grid: step must divide 1");

    std::vector<std::vector<double>> grid;
    std::vector<long> current(dims, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t d, long remaining) {
        if (d + 1 == dims) {
            current[d] = remaining;
            std::vector<double> w(dims);
            for (std::size_t i = 0; i < dims; ++i) w[i] = static_cast<double>(current[i]) / static_cast<double>(parts);
            grid.push_back(std::move(w));
            return;
        }
        for (long v = remaining; v >= 0; --v) {
            current[d] = v;
            rec(d + 1, remaining - v);
        }
    };
    rec(0, parts);
    return grid;
}

std::vector<double> search_fusion_weights(std::span<const PredictionSet> sets, std::span<const Label> truth, double step,
                                          const ClassCounts& counts) {
    const auto grid = simplex_grid(sets.size(), step);
    if (grid.empty()) throw ConfigError("search_fusion_weights: empty grid");
    if (truth.size() != sets[0].size()) throw DataError("search_fusion_weights: truth length does not match predictions");
    const double uniform = 1.0 / static_cast<double>(sets.size());
    auto spread = [&](const std::vector<double>& w) {
        double s = 0.0;
        for (double x : w) s += (x - uniform) * (x - uniform);
        return s;
    };

    const std::vector<double>* best = nullptr;
    double best_uar = -1.0, best_spread = 0.0;
    for (const auto& w : grid) {
        const PredictionSet fused = weighted_score_fusion(sets, w, counts);
        const double score = eval::uar(truth, fused.labels);
        const double sp = spread(w);
        bool better = false;
        if (!best || score > best_uar + 1e-12) {
            better = true;
        } else if (std::abs(score - best_uar) <= 1e-12) {
            // Grid order is lexicographically descending, so an equal spread keeps the earlier vector.
            better = sp < best_spread - 1e-15;
        }
        if (better) {
            best = &w;
            best_uar = score;
            best_spread = sp;
        }
    }
    return *best;
}

std::pair<std::size_t, std::size_t> designate_majority_minority(const ConfusionMatrix& first,
                                                                const ConfusionMatrix& second,
                                                                const LabelSet& minority_set) {
    auto minority_recall = [&](const ConfusionMatrix& cm) {
        double sum = 0.0;
        int n = 0;
        for (Label l : kAllLabels) {
            if (!minority_set.contains(l)) continue;
            if (auto r = cm.recall(l)) {
                sum += *r;
                ++n;
            }
        }
        return n == 0 ? 0.0 : sum / n;
    };
    return minority_recall(second) > minority_recall(first) ? std::pair<std::size_t, std::size_t>{0, 1}
                                                             : std::pair<std::size_t, std::size_t>{1, 0};
}

} // namespace affect::fuse
