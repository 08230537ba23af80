// Acceptance gate: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "affect/app/commands.hpp"
#include "affect/app/config.hpp"
#include "affect/app/synth.hpp"
#include "affect/common/csv.hpp"
#include "affect/eval/metrics.hpp"
#include "affect/fuse/fusion.hpp"
#include "affect/fv/fisher.hpp"
#include "affect/fv/gmm.hpp"
#include "affect/learn/solvers.hpp"
#include "affect/text/features.hpp"
#include "affect/text/lexicon.hpp"
#include "affect/text/porter.hpp"
#include "affect/text/tokenize.hpp"
#include "test_support.hpp"

using namespace affect;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Outcome of one criterion: pass flag plus a one-line detail.
struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

Outcome truth_table() {
    const auto start = Clock::now();
    const CsvTable table = read_csv(testing::data_dir() / "fuse_two_truth_table.csv");
    const std::size_t cp = table.column("p"), cs = table.column("s"), cm = table.column("minority_set"),
                      ce = table.column("expected");
    std::size_t matched = 0;
    for (const auto& row : table.rows) {
        const Label got = fuse::fuse_two_labels(parse_label(row[cp]), parse_label(row[cs]), LabelSet::parse(row[cm]));
        matched += got == parse_label(row[ce]) ? 1 : 0;
    }
    const double secs = seconds_since(start);
    return {table.rows.size() == 36 && matched == 36 && secs < 1.0,
            std::to_string(matched) + "/" + std::to_string(table.rows.size()) + " cases in " + fmt(secs, 3) + " s"};
}

Outcome em_monotonicity() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    std::size_t iterations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> n_dist(50, 2000), d_dist(1, 20), k_dist(1, 8);
        const int n = n_dist(rng), d = d_dist(rng), k = k_dist(rng);
        Eigen::MatrixXd x = testing::random_matrix(n, d, rng);
        // Half of the datasets get cluster structure, half are a single blob.
        if (trial % 2 == 0) {
            const Eigen::MatrixXd centres = testing::random_matrix(k, d, rng) * 4.0;
            for (int i = 0; i < n; ++i) x.row(i) += centres.row(i % k);
        }
        fv::GmmOptions opt;
        opt.components = k;
        opt.seed = static_cast<std::uint64_t>(trial);
        opt.relative_tolerance = 1e-10;
        opt.max_iterations = 100;
        const fv::GmmModel m = fv::fit_gmm(x, opt);
        const auto& h = m.log_likelihood_history;
        iterations += h.size();
        for (std::size_t i = 1; i < h.size(); ++i) worst = std::max(worst, h[i - 1] - h[i]);
    }
    return {worst <= 1e-8, "largest log-likelihood decrease " + fmt(worst, 3) + " over 50 datasets, " +
                               std::to_string(iterations) + " recorded steps"};
}

Outcome fisher_identities() {
    const auto start = Clock::now();
    std::mt19937_64 rng(77);
    bool dims_ok = true;
    double worst_mean_block = 0.0, worst_relative = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> d_dist(2, 12), k_dist(2, 8);
        const int d = d_dist(rng), k = k_dist(rng);
        const Eigen::MatrixXd centres = testing::random_matrix(k, d, rng) * 5.0;
        Eigen::MatrixXd x = testing::random_matrix(400 * k, d, rng);
        for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) += centres.row(i % k);
        fv::GmmOptions opt;
        opt.components = k;
        opt.seed = static_cast<std::uint64_t>(trial);
        const fv::GmmModel m = fv::fit_gmm(x, opt);

        // Story frames come from shifted clusters, not the GMM training data.
        Eigen::MatrixXd story = testing::random_matrix(300 + 40 * trial, d, rng);
        for (Eigen::Index i = 0; i < story.rows(); ++i) story.row(i) += centres.row((i * 7) % k) * 1.1;
        const fv::FisherVector whole = fv::encode_fv(m, story);
        dims_ok = dims_ok && whole.values.size() == 2 * k * d;

        for (int c = 0; c < k; ++c) {
            const Eigen::MatrixXd at_mean = m.means.row(c).replicate(25, 1);
            const Eigen::VectorXd v = fv::encode_fv(m, at_mean).values;
            worst_mean_block = std::max(worst_mean_block, v.segment(2 * c * d, d).cwiseAbs().maxCoeff());
        }

        // A story FV is the frame-count-weighted average of its chunk FVs.
        std::uniform_int_distribution<Eigen::Index> cut(1, story.rows() - 1);
        std::vector<Eigen::Index> bounds{0, cut(rng), cut(rng), cut(rng), story.rows()};
        std::sort(bounds.begin(), bounds.end());
        Eigen::VectorXd averaged = Eigen::VectorXd::Zero(whole.values.size());
        for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
            const Eigen::Index len = bounds[b + 1] - bounds[b];
            if (len == 0) continue;
            averaged += static_cast<double>(len) * fv::encode_fv(m, story.middleRows(bounds[b], len)).values;
        }
        averaged /= static_cast<double>(story.rows());
        worst_relative = std::max(worst_relative, (averaged - whole.values).norm() / whole.values.norm());
    }
    const double secs = seconds_since(start);
    return {dims_ok && worst_mean_block < 1e-9 && worst_relative < 1e-9 && secs < 30.0,
            std::string("dimension 2KD ") + (dims_ok ? "exact" : "WRONG") + ", mean block " +
                fmt(worst_mean_block, 3) + ", chunk average relative error " + fmt(worst_relative, 3) + ", " +
                fmt(secs, 3) + " s"};
}

Outcome solver_residuals() {
    std::mt19937_64 rng(31);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 15 * (trial + 1);
        const Eigen::MatrixXd a = testing::random_matrix(n, n / 2 + 1, rng);
        const Eigen::MatrixXd k = a * a.transpose();
        const Eigen::MatrixXd t = testing::random_matrix(n, 3, rng);
        const double c = std::pow(10.0, trial % 5 - 2);
        const Eigen::MatrixXd beta = learn::fit_kelm(k, t, c);
        const Eigen::MatrixXd residual = (Eigen::MatrixXd::Identity(n, n) / c + k) * beta - t;
        worst = std::max(worst, residual.cwiseAbs().maxCoeff());
    }

    double balanced_gap = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Index n = 60 * (trial + 1);
        const Eigen::MatrixXd a = testing::random_matrix(n, n / 3, rng);
        const Eigen::MatrixXd k = a * a.transpose();
        std::vector<Label> labels;
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(label_at(static_cast<std::size_t>(i % 3)));
        const Eigen::VectorXd w = learn::class_balance_weights(labels);
        const Eigen::MatrixXd plain = learn::fit_kelm(k, labels, 3.0);
        const Eigen::MatrixXd weighted = learn::fit_kelm(k, labels, 3.0, &w);
        balanced_gap = std::max(balanced_gap, (plain - weighted).cwiseAbs().maxCoeff());
    }
    return {worst < 1e-8 && balanced_gap < 1e-10,
            "max residual " + fmt(worst, 3) + " on 20 systems up to 300x300, balanced WKELM vs KELM " +
                fmt(balanced_gap, 3)};
}

Outcome uar_oracle() {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::uniform_int_distribution<std::size_t> n_dist(1, 300);
        const std::size_t n = n_dist(rng);
        const auto truth = testing::random_labels(n, rng);
        const auto pred = testing::random_labels(n, rng);
        double total = 0.0;
        int present = 0;
        for (Label c : kAllLabels) {
            std::size_t count = 0, hit = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (truth[i] == c) {
                    ++count;
                    hit += pred[i] == c ? 1 : 0;
                }
            if (count > 0) {
                total += static_cast<double>(hit) / static_cast<double>(count);
                ++present;
            }
        }
        worst = std::max(worst, std::abs(eval::uar(truth, pred) - total / present));
    }
    return {worst <= 1e-12, "max deviation " + fmt(worst, 3) + " over 1000 label vectors"};
}

Outcome dictionary_features() {
    const fs::path lex = testing::data_dir() / "lexicon";
    const auto ws = text::parse_sentiws(read_text_file(lex / "mini_sentiws.txt"));
    const auto swn = text::parse_sentiwordnet(read_text_file(lex / "mini_sentiwordnet.txt"));
    const auto de = text::tokenize(read_text_file(lex / "fixture_de.txt"), text::Language::De);
    const auto en = text::tokenize(read_text_file(lex / "fixture_en.txt"), text::Language::En, true);

    std::vector<double> got = text::sentiws_features(ws, de).values;
    const auto swn_values = text::sentiwordnet_features(swn, en).values;
    got.insert(got.end(), swn_values.begin(), swn_values.end());
    const std::vector<double> expected{-0.7706, 0.6502, 1.4208, 0.4611 / 9, 0.4611, 6,    3,    0,    0.75, 0.75,
                                       0.2375,  2.375,  10,     0,          0.875,  0.875, 0.275, 2.75, 10};
    double worst = got.size() == expected.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; i < std::min(got.size(), expected.size()); ++i)
        worst = std::max(worst, std::abs(got[i] - expected[i]));

    auto subset = text::reference_dictionary_subset();
    std::set<std::string> names(subset.begin(), subset.end());
    const std::set<std::string> wanted{"swn.pos_max", "swn.neg_sum", "sentiws.min", "sentiws.max", "sentiws.n_neg"};
    const bool tokens_ok = de.size() == 30 && en.size() == 30;
    return {tokens_ok && worst <= 1e-12 && names == wanted && subset.size() == wanted.size(),
            std::to_string(got.size()) + " statistics, max deviation " + fmt(worst, 3) + ", reference subset " +
                (names == wanted ? "matches" : "DIFFERS")};
}

Outcome porter() {
    std::ifstream voc(testing::data_dir() / "porter" / "voc.txt"), out(testing::data_dir() / "porter" / "output.txt");
    if (!voc || !out) return {false, "reference vocabulary missing"};
    std::string w, s;
    std::size_t n = 0, agree = 0;
    while (std::getline(voc, w) && std::getline(out, s)) {
        ++n;
        agree += text::porter_stem(w) == s ? 1 : 0;
    }
    return {n > 0 && agree == n, std::to_string(agree) + "/" + std::to_string(n) + " reference pairs"};
}

Outcome synthetic_end_to_end() {
    const auto start = Clock::now();
    const fs::path dir = testing::scratch_dir("acceptance_e2e");
    app::SynthOptions opt;
    opt.speakers = 87;
    opt.stories_per_speaker = 3;
    const app::SynthSummary summary = app::synthesize_corpus(dir, opt);
    app::PipelineConfig config = app::load_config(summary.config);
    config.folds = 4;

    std::map<std::string, double> mean;  // modality -> mean UAR over both tasks
    std::string detail;
    for (Task task : {Task::Arousal, Task::Valence}) {
        config.task = task;
        const app::CvRun run = app::run_cv_pipeline(config, app::Modality::Bimodal);
        mean["bimodal"] += run.uar / 2;
        detail += std::string(to_string(task)) + ": bimodal " + fmt(run.uar);
        for (const auto& c : run.components) {
            mean[app::to_string(c.modality)] += c.uar / 2;
            detail += ", " + app::to_string(c.modality) + " " + fmt(c.uar);
            if (task == Task::Arousal && c.modality == app::Modality::Acoustic) mean["acoustic_arousal"] = c.uar;
            if (task == Task::Valence && c.modality == app::Modality::Linguistic) mean["linguistic_valence"] = c.uar;
        }
        detail += "; ";
    }
    const double secs = seconds_since(start);
    const double best_single = std::max(mean["acoustic"], mean["linguistic"]);
    const bool pass = mean["acoustic_arousal"] >= 0.85 && mean["linguistic_valence"] >= 0.85 &&
                      mean["bimodal"] >= best_single - 0.02 && secs < 600.0;
    return {pass, detail + "fused mean " + fmt(mean["bimodal"]) + " vs best single mean " + fmt(best_single) +
                      ", " + fmt(secs, 3) + " s"};
}

Outcome nested_audit() {
    const fs::path dir = testing::scratch_dir("acceptance_nested");
    app::SynthOptions opt;
    opt.speakers = 30;
    opt.stories_per_speaker = 3;
    opt.test_speakers = 3;
    const app::SynthSummary summary = app::synthesize_corpus(dir, opt);
    app::PipelineConfig config = app::load_config(summary.config);
    config.acoustic.classifier.c_reg = {0.1, 1.0, 10.0};
    config.linguistic.classifier.c_reg = {0.1, 10.0};
    config.classifier.c_reg = {1.0, 100.0};

    std::size_t runs = 0, pre = 0, scoring = 0, clean_runs = 0;
    for (Task task : {Task::Arousal, Task::Valence})
        for (app::Modality m : {app::Modality::Acoustic, app::Modality::Linguistic, app::Modality::Bimodal})
            for (std::uint64_t seed : {1u, 2u}) {
                config.task = task;
                config.seed = seed;
                const app::NestedRun run = app::run_nested_pipeline(config, m);
                ++runs;
                pre += run.result.pre_scoring_reads;
                scoring += run.result.scoring_reads;
                clean_runs += run.result.pre_scoring_reads == 0 && run.result.scoring_reads > 0 ? 1 : 0;
            }
    return {clean_runs == runs, std::to_string(runs) + " nested runs, " + std::to_string(pre) +
                                    " pre-scoring reads, " + std::to_string(scoring) + " scoring reads"};
}

/// Every CSV under `dir`, relative path -> contents.
std::map<std::string, std::string> csv_snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv")
            out[fs::relative(e.path(), dir).generic_string()] = read_text_file(e.path());
    return out;
}

/// Runs every command once against a fresh output and cache directory.
void run_all_commands(const app::PipelineConfig& base) {
    fs::remove_all(base.output_dir);
    if (base.cache_dir) fs::remove_all(*base.cache_dir);
    app::PipelineConfig config = base;
    config.acoustic.classifier.c_reg = {0.1, 1.0};
    for (app::Modality m : {app::Modality::Acoustic, app::Modality::Linguistic, app::Modality::Bimodal})
        app::extract_features(config, m);
    app::fit_fv_models(config, config.output_dir / "models");
    app::encode_fv_file(config, config.output_dir / "models", config.output_dir / "encoded.csv");

    std::vector<learn::PredictionSet> sets;
    std::vector<Label> truth;
    ClassCounts counts{};
    for (app::Modality m : {app::Modality::Acoustic, app::Modality::Linguistic, app::Modality::Bimodal}) {
        const app::CvRun run = app::run_cv_pipeline(config, m);
        app::write_cv_outputs(config, run);
        sets.push_back(run.out_of_fold);
        truth = run.truth;
        counts = run.counts;
    }
    app::write_nested_outputs(config, app::run_nested_pipeline(config, app::Modality::Acoustic));

    const auto ctx = fuse::FusionContext::from_counts(counts);
    learn::write_predictions_csv(config.output_dir / "fused_two.csv", fuse::fuse_two(sets[0], sets[1], ctx));
    learn::write_predictions_csv(config.output_dir / "fused_vote.csv", fuse::majority_vote(sets, ctx));
    const std::vector<learn::PredictionSet> pair{sets[0], sets[1]};
    const auto weights = fuse::search_fusion_weights(pair, truth, 0.1, counts);
    learn::write_predictions_csv(config.output_dir / "fused_weighted.csv",
                                 fuse::weighted_score_fusion(pair, weights, counts));
}

Outcome determinism() {
    const fs::path a = testing::scratch_dir("acceptance_det_a"), b = testing::scratch_dir("acceptance_det_b");
    app::SynthOptions opt;
    opt.speakers = 24;
    opt.stories_per_speaker = 3;
    opt.test_speakers = 3;
    app::synthesize_corpus(a, opt);
    const app::SynthSummary summary = app::synthesize_corpus(b, opt);
    const bool synth_same = csv_snapshot(a) == csv_snapshot(b);

    const app::PipelineConfig config = app::load_config(summary.config);
    run_all_commands(config);
    const auto first = csv_snapshot(config.output_dir);
    const char* previous = std::getenv("AFFECT_WORKERS");
    const std::string saved = previous ? previous : "";
    ::setenv("AFFECT_WORKERS", "1", 1);
    run_all_commands(config);
    if (previous)
        ::setenv("AFFECT_WORKERS", saved.c_str(), 1);
    else
        ::unsetenv("AFFECT_WORKERS");
    const auto second = csv_snapshot(config.output_dir);

    std::size_t differing = 0;
    for (const auto& [name, content] : first) {
        auto it = second.find(name);
        if (it == second.end() || it->second != content) ++differing;
    }
    const bool pass = synth_same && first.size() >= 20 && first.size() == second.size() && differing == 0;
    return {pass, std::string("synth ") + (synth_same ? "identical" : "DIFFERS") + ", " +
                      std::to_string(first.size()) + " command CSVs compared (second pass single-threaded), " +
                      std::to_string(differing) + " differ"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"two-set fusion truth table", truth_table},
        {"EM log-likelihood monotonicity", em_monotonicity},
        {"Fisher vector identities", fisher_identities},
        {"KELM solver residuals", solver_residuals},
        {"UAR oracle equivalence", uar_oracle},
        {"dictionary features on fixtures", dictionary_features},
        {"Porter stemmer reference vocabulary", porter},
        {"synthetic end-to-end", synthetic_end_to_end},
        {"nested CV label audit", nested_audit},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
