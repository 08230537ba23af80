#include "affect/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "affect/app/pipeline.hpp"
#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"
#include "affect/fuse/fusion.hpp"
#include "affect/fv/model_io.hpp"

namespace affect::app {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

ClassCounts count_labels(std::span<const Label> labels) {
    ClassCounts c{};
    for (Label l : labels) ++c[index_of(l)];
    return c;
}

learn::PredictionSet take(const learn::PredictionSet& set, std::span<const std::size_t> rows) {
    learn::PredictionSet out;
    out.source = set.source;
    out.scores.resize(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.story_ids.push_back(set.story_ids[rows[r]]);
        out.labels.push_back(set.labels[rows[r]]);
        out.scores.row(static_cast<Eigen::Index>(r)) = set.scores.row(static_cast<Eigen::Index>(rows[r]));
    }
    return out;
}

std::string source_tag(const learn::ModelSpec& spec, const PipelineConfig& config) {
    return spec.describe() + "@cfg:" + config.hash();
}

/// Feature builder and classifier grid for one modality.
struct ModalitySetup {
    eval::FeatureBuilder builder;
    const ClassifierSection* classifier = nullptr;
};

ModalitySetup make_setup(const PipelineConfig& config, const corpus::Corpus& corpus, Modality modality,
                         Diagnostics* diag, StageTimings* timings) {
    auto acoustic = [&] {
        if (!config.acoustic.enabled) throw ConfigError("[acoustic] enabled: the acoustic modality is disabled");
        auto f = std::make_shared<AcousticFeatures>(corpus, config.acoustic, config.seed, config.cache_dir, diag, timings);
        return eval::FeatureBuilder([f](const eval::FeatureRequest& r) { return (*f)(r); });
    };
    auto linguistic = [&] {
        if (!config.linguistic.enabled) throw ConfigError("[linguistic] enabled: the linguistic modality is disabled");
        auto f = std::make_shared<LinguisticFeatures>(corpus, config.linguistic, config.seed, diag, timings);
        return eval::FeatureBuilder([f](const eval::FeatureRequest& r) { return (*f)(r); });
    };
    switch (modality) {
    case Modality::Acoustic: return {acoustic(), &config.acoustic.classifier};
    case Modality::Linguistic: return {linguistic(), &config.linguistic.classifier};
    case Modality::Bimodal: return {concat_builders(acoustic(), linguistic()), &config.classifier};
    }
    throw ConfigError("unknown modality");
}

CvRun weighted_bimodal(const PipelineConfig& config, Diagnostics* diag) {
    CvRun a = run_cv_pipeline(config, Modality::Acoustic, diag);
    CvRun l = run_cv_pipeline(config, Modality::Linguistic, diag);
    learn::require_aligned(a.out_of_fold, l.out_of_fold);
    const auto start = Clock::now();

    CvRun run;
    run.task = config.task;
    run.modality = Modality::Bimodal;
    run.source = "weighted(" + a.source + "," + l.source + ")";
    run.truth = a.truth;
    run.counts = a.counts;
    run.out_of_fold.story_ids = a.out_of_fold.story_ids;
    run.out_of_fold.labels.resize(a.truth.size());
    run.out_of_fold.scores.resize(a.out_of_fold.scores.rows(), 3);
    run.out_of_fold.source = run.source;

    std::map<std::string, std::size_t> fold_of;
    {
        // Both runs share the fold plan (same dataset and seed); recover it from the acoustic folds.
        const auto data = eval::CvDataset::from_corpus(load_corpus(config, diag), config.task);
        const auto plan = eval::plan_folds(data, config.folds, config.seed);
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.labels[i]) fold_of[data.story_ids[i]] = plan.fold_of(data.speaker_ids[i]);
    }
    for (std::size_t k = 0; k < config.folds; ++k) {
        std::vector<std::size_t> in, out;
        for (std::size_t i = 0; i < run.truth.size(); ++i)
            (fold_of.at(run.out_of_fold.story_ids[i]) == k ? in : out).push_back(i);
        std::vector<Label> out_truth;
        for (std::size_t i : out) out_truth.push_back(run.truth[i]);
        const ClassCounts counts = count_labels(out_truth);
        std::vector<double> weights = config.fusion.weights;
        if (weights.empty()) {
            const std::vector<learn::PredictionSet> dev{take(a.out_of_fold, out), take(l.out_of_fold, out)};
            weights = fuse::search_fusion_weights(dev, out_truth, config.fusion.step, counts);
        }
        const std::vector<learn::PredictionSet> fold_sets{take(a.out_of_fold, in), take(l.out_of_fold, in)};
        const auto fused = fuse::weighted_score_fusion(fold_sets, weights, counts);
        std::vector<Label> fold_truth;
        for (std::size_t r = 0; r < in.size(); ++r) {
            run.out_of_fold.labels[in[r]] = fused.labels[r];
            run.out_of_fold.scores.row(static_cast<Eigen::Index>(in[r])) = fused.scores.row(static_cast<Eigen::Index>(r));
            fold_truth.push_back(run.truth[in[r]]);
        }
        run.fold_uar.push_back(eval::uar(fold_truth, fused.labels));
        run.fold_weights.push_back(weights);
    }
    run.confusion = eval::confusion(run.truth, run.out_of_fold.labels);
    run.uar = eval::uar(run.confusion);

    if (!a.test.story_ids.empty()) {
        std::vector<double> weights = config.fusion.weights;
        const std::vector<learn::PredictionSet> dev{a.out_of_fold, l.out_of_fold};
        if (weights.empty()) weights = fuse::search_fusion_weights(dev, run.truth, config.fusion.step, run.counts);
        const std::vector<learn::PredictionSet> test{a.test, learn::align_to(l.test, a.test.story_ids)};
        run.test = fuse::weighted_score_fusion(test, weights, run.counts);
        run.test.source = run.source;
    }
    run.timings = a.timings;
    for (const auto& t : l.timings) run.timings.push_back(t);
    run.timings.emplace_back("weighted fusion", seconds_since(start));
    run.components.push_back(std::move(a));
    run.components.push_back(std::move(l));
    return run;
}

std::string format_fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string confusion_text(const eval::ConfusionMatrix& cm) {
    std::string out = "        pred_L  pred_M  pred_H\n";
    for (Label t : kAllLabels) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "true_%c %7ld %7ld %7ld\n", to_char(t), cm.at(t, Label::Low),
                      cm.at(t, Label::Medium), cm.at(t, Label::High));
        out += buf;
    }
    return out;
}

std::string timings_text(const std::vector<std::pair<std::string, double>>& timings) {
    std::string out;
    for (const auto& [name, s] : timings) out += "  " + name + ": " + format_fixed(s, 3) + " s\n";
    return out;
}

void write_truth(const fs::path& path, const std::vector<std::string>& ids, const std::vector<Label>& truth) {
    std::string out = "story_id,label\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out += csv_field(ids[i]) + ',' + to_char(truth[i]) + '\n';
    write_text_file(path, out);
}

fs::path output_prefix(const PipelineConfig& config, const std::string& kind, Modality m) {
    fs::create_directories(config.output_dir);
    return config.output_dir / (kind + "_" + std::string(to_string(config.task)) + "_" + to_string(m));
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
    return prefix.parent_path() / (prefix.filename().string() + suffix);
}

void write_feature_csv(const fs::path& path, const std::vector<std::string>& ids, const std::vector<std::string>& names,
                       const Eigen::MatrixXd& m) {
    std::string out = "story_id";
    for (const auto& n : names) out += ',' + csv_field(n);
    out += '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += csv_field(ids[i]);
        for (Eigen::Index c = 0; c < m.cols(); ++c) out += ',' + format_real(m(static_cast<Eigen::Index>(i), c));
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<std::size_t> indices_of(const std::vector<std::size_t>& v) { return v; }

} // namespace

std::string to_string(Modality m) {
    switch (m) {
    case Modality::Acoustic: return "acoustic";
    case Modality::Linguistic: return "linguistic";
    case Modality::Bimodal: return "bimodal";
    }
    return "acoustic";
}

Modality parse_modality(const std::string& s) {
    if (s == "acoustic") return Modality::Acoustic;
    if (s == "linguistic") return Modality::Linguistic;
    if (s == "bimodal") return Modality::Bimodal;
    throw ConfigError("unknown modality '" + s + "' (expected acoustic, linguistic or bimodal)");
}

Modality default_modality(const PipelineConfig& config) {
    if (config.bimodal()) return Modality::Bimodal;
    return config.acoustic.enabled ? Modality::Acoustic : Modality::Linguistic;
}

CvRun run_cv_pipeline(const PipelineConfig& config, Modality modality, Diagnostics* diag) {
    if (modality == Modality::Bimodal && config.fusion.mode == FusionMode::Weighted) return weighted_bimodal(config, diag);

    StageTimings timings;
    const auto start = Clock::now();
    const corpus::Corpus corpus = load_corpus(config, diag);
    const auto data = eval::CvDataset::from_corpus(corpus, config.task);
    const ModalitySetup setup = make_setup(config, corpus, modality, diag, &timings);
    const learn::ModelSpec spec = setup.classifier->first();

    eval::CvOptions options;
    options.folds = config.folds;
    options.seed = config.seed;
    options.test_indices = data.unlabeled_indices();
    options.source = source_tag(spec, config);
    const auto cv_start = Clock::now();
    const eval::CvResult result = eval::run_cv(data, setup.builder, spec, options);
    timings.add("cross-validation", seconds_since(cv_start));

    CvRun run;
    run.task = config.task;
    run.modality = modality;
    run.source = options.source;
    run.out_of_fold = result.out_of_fold;
    run.truth = result.truth;
    run.counts = count_labels(result.truth);
    run.confusion = result.confusion;
    run.uar = result.uar;
    for (const auto& f : result.folds) run.fold_uar.push_back(f.uar);
    run.test = result.test_fused;
    timings.add("total", seconds_since(start));
    run.timings = timings.totals();
    return run;
}

fs::path write_cv_outputs(const PipelineConfig& config, const CvRun& run) {
    const fs::path prefix = output_prefix(config, "cv", run.modality);
    learn::write_predictions_csv(with_suffix(prefix, "_predictions.csv"), run.out_of_fold);
    write_truth(with_suffix(prefix, "_truth.csv"), run.out_of_fold.story_ids, run.truth);
    write_counts_json(with_suffix(prefix, "_counts.json"), run.counts);
    write_text_file(with_suffix(prefix, "_confusion.csv"), run.confusion.to_csv());
    std::string folds = run.fold_weights.empty() ? "fold,uar\n" : "fold,uar,weight_acoustic,weight_linguistic\n";
    for (std::size_t k = 0; k < run.fold_uar.size(); ++k) {
        folds += std::to_string(k) + ',' + format_real(run.fold_uar[k]);
        if (!run.fold_weights.empty())
            for (double w : run.fold_weights[k]) folds += ',' + format_real(w);
        folds += '\n';
    }
    write_text_file(with_suffix(prefix, "_folds.csv"), folds);
    if (!run.test.story_ids.empty()) learn::write_predictions_csv(with_suffix(prefix, "_test_predictions.csv"), run.test);
    for (const auto& c : run.components) write_cv_outputs(config, c);

    std::string report = "cross-validation report\n";
    report += "task: " + std::string(to_string(run.task)) + "\n";
    report += "modality: " + to_string(run.modality) + "\n";
    report += "source: " + run.source + "\n";
    report += "config hash: " + config.hash() + "\n";
    report += "seed: " + std::to_string(config.seed) + "\n";
    report += "folds: " + std::to_string(config.folds) + "\n";
    report += "labeled stories: " + std::to_string(run.truth.size()) + "\n";
    report += "test stories: " + std::to_string(run.test.story_ids.size()) + "\n";
    report += "overall UAR: " + format_fixed(run.uar) + "\n";
    for (std::size_t k = 0; k < run.fold_uar.size(); ++k) {
        report += "  fold " + std::to_string(k) + " UAR: " + format_fixed(run.fold_uar[k]);
        if (!run.fold_weights.empty())
            report += " (weights " + format_fixed(run.fold_weights[k][0], 2) + ", " + format_fixed(run.fold_weights[k][1], 2) + ")";
        report += "\n";
    }
    for (const auto& c : run.components)
        report += "component " + to_string(c.modality) + " UAR: " + format_fixed(c.uar) + "\n";
    report += "confusion (rows truth, columns prediction):\n" + confusion_text(run.confusion);
    report += "stage timings:\n" + timings_text(run.timings);
    report += "configuration:\n" + config.canonical();
    write_text_file(with_suffix(prefix, "_report.txt"), report);
    return prefix;
}

NestedRun run_nested_pipeline(const PipelineConfig& config, Modality modality, Diagnostics* diag) {
    StageTimings timings;
    const auto start = Clock::now();
    const corpus::Corpus corpus = load_corpus(config, diag);
    const auto data = eval::CvDataset::from_corpus(corpus, config.task);
    const ModalitySetup setup = make_setup(config, corpus, modality, diag, &timings);

    NestedRun run;
    run.task = config.task;
    run.modality = modality;
    run.grid = setup.classifier->grid();
    eval::NestedOptions options;
    options.outer_folds = config.folds;
    options.inner_folds = config.inner_folds;
    options.seed = config.seed;
    options.source = "nested:" + learn::to_string(setup.classifier->kind) + "@cfg:" + config.hash();
    run.result = eval::run_nested_cv(data, setup.builder, run.grid, options);
    timings.add("total", seconds_since(start));
    run.timings = timings.totals();
    return run;
}

fs::path write_nested_outputs(const PipelineConfig& config, const NestedRun& run) {
    const fs::path prefix = output_prefix(config, "nested", run.modality);
    const auto& r = run.result;
    learn::write_predictions_csv(with_suffix(prefix, "_predictions.csv"), r.out_of_fold);
    std::string folds = "fold,uar,chosen\n";
    for (const auto& f : r.folds)
        folds += std::to_string(f.fold) + ',' + format_real(f.uar) + ',' + csv_field(run.grid[f.chosen].describe()) + '\n';
    write_text_file(with_suffix(prefix, "_folds.csv"), folds);

    std::string report = "nested cross-validation report\n";
    report += "task: " + std::string(to_string(run.task)) + "\n";
    report += "modality: " + to_string(run.modality) + "\n";
    report += "config hash: " + config.hash() + "\n";
    report += "seed: " + std::to_string(config.seed) + "\n";
    report += "outer folds: " + std::to_string(config.folds) + ", inner folds: " + std::to_string(config.inner_folds) + "\n";
    report += "grid points: " + std::to_string(run.grid.size()) + "\n";
    report += "generalization estimate (mean outer UAR): " + format_fixed(r.mean_uar) + "\n";
    report += "pooled outer UAR: " + format_fixed(r.pooled_uar) + "\n";
    for (const auto& f : r.folds) {
        report += "  outer fold " + std::to_string(f.fold) + " UAR: " + format_fixed(f.uar) + ", chosen " +
                  run.grid[f.chosen].describe() + " (inner UAR " + format_fixed(f.inner_uar[f.chosen]) + ")\n";
    }
    report += "outer-test label reads before scoring: " + std::to_string(r.pre_scoring_reads) + "\n";
    report += "outer-test label reads while scoring: " + std::to_string(r.scoring_reads) + "\n";
    report += "stage timings:\n" + timings_text(run.timings);
    report += "configuration:\n" + config.canonical();
    write_text_file(with_suffix(prefix, "_report.txt"), report);
    return prefix;
}

fs::path extract_features(const PipelineConfig& config, Modality modality, Diagnostics* diag) {
    const corpus::Corpus corpus = load_corpus(config, diag);
    const auto data = eval::CvDataset::from_corpus(corpus, config.task);
    const auto train = data.labeled_indices();
    std::vector<Label> train_labels;
    for (std::size_t i : train) train_labels.push_back(*data.labels[i]);
    std::vector<std::size_t> all(corpus.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    std::vector<std::string> names;
    Eigen::MatrixXd features;
    auto append = [&](const std::vector<std::string>& n, const Eigen::MatrixXd& m) {
        Eigen::MatrixXd joined(m.rows(), features.cols() + m.cols());
        if (features.cols() > 0) joined.leftCols(features.cols()) = features;
        joined.rightCols(m.cols()) = m;
        features = std::move(joined);
        names.insert(names.end(), n.begin(), n.end());
    };
    if (modality != Modality::Linguistic) {
        if (!config.acoustic.enabled) throw ConfigError("[acoustic] enabled: the acoustic modality is disabled");
        AcousticFeatures ac(corpus, config.acoustic, config.seed, config.cache_dir, diag);
        const auto fitted = ac.fit(train);
        append(ac.feature_names(fitted), ac.encode(fitted, all));
    }
    if (modality != Modality::Acoustic) {
        if (!config.linguistic.enabled) throw ConfigError("[linguistic] enabled: the linguistic modality is disabled");
        LinguisticFeatures li(corpus, config.linguistic, config.seed, diag);
        const auto fitted = li.fit(train, train_labels);
        append(li.feature_names(fitted), li.encode(fitted, all));
    }
    fs::create_directories(config.output_dir);
    const fs::path path = config.output_dir / ("features_" + to_string(modality) + ".csv");
    write_feature_csv(path, data.story_ids, names, features);
    return path;
}

void fit_fv_models(const PipelineConfig& config, const fs::path& model_dir, Diagnostics* diag) {
    const corpus::Corpus corpus = load_corpus(config, diag);
    const auto data = eval::CvDataset::from_corpus(corpus, config.task);
    AcousticFeatures ac(corpus, config.acoustic, config.seed, config.cache_dir, diag);
    const auto fitted = ac.fit(indices_of(data.labeled_indices()));
    fs::create_directories(model_dir);
    fv::save_pca(model_dir / "lld_pca.afp", fitted.lld_pca);
    fv::save_gmm(model_dir / "gmm.afp", fitted.gmm);
    if (fitted.fv_pca) fv::save_pca(model_dir / "fv_pca.afp", *fitted.fv_pca);
    else if (fs::exists(model_dir / "fv_pca.afp")) fs::remove(model_dir / "fv_pca.afp");
}

void encode_fv_file(const PipelineConfig& config, const fs::path& model_dir, const fs::path& out_csv, Diagnostics* diag) {
    const corpus::Corpus corpus = load_corpus(config, diag);
    AcousticFeatures ac(corpus, config.acoustic, config.seed, config.cache_dir, diag);
    AcousticFeatures::Fitted fitted{fv::load_pca(model_dir / "lld_pca.afp"), fv::load_gmm(model_dir / "gmm.afp"),
                                    std::nullopt};
    if (fs::exists(model_dir / "fv_pca.afp")) fitted.fv_pca = fv::load_pca(model_dir / "fv_pca.afp");
    std::vector<std::size_t> all(corpus.size());
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
        ids.push_back(corpus[i].story_id);
    }
    if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
    write_feature_csv(out_csv, ids, ac.feature_names(fitted), ac.encode(fitted, all));
}

ClassCounts read_counts_json(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    ClassCounts counts{};
    for (Label l : kAllLabels) {
        const std::string key(1, to_char(l));
        if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long>() < 0)
            throw DataError(path.string() + ": expected a non-negative integer count for '" + key + "'");
        counts[index_of(l)] = j[key].get<std::size_t>();
    }
    return counts;
}

void write_counts_json(const fs::path& path, const ClassCounts& counts) {
    nlohmann::ordered_json j;
    for (Label l : kAllLabels) j[std::string(1, to_char(l))] = counts[index_of(l)];
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::pair<std::string, Label>> read_truth_csv(const fs::path& path) {
    const CsvTable table = read_csv(path);
    const std::size_t c_id = table.column("story_id"), c_label = table.column("label");
    std::vector<std::pair<std::string, Label>> out;
    for (const auto& row : table.rows) out.emplace_back(row[c_id], parse_label(row[c_label]));
    return out;
}

std::string build_report(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("no predictions: " + dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 16 && name.ends_with("_predictions.csv")) files.push_back(entry.path());
    }
    if (files.empty()) throw DataError("no predictions found in " + dir.string());
    std::sort(files.begin(), files.end());

    std::string out = "prediction report for " + dir.string() + "\n";
    for (const auto& f : files) {
        const auto set = learn::read_predictions_csv(f);
        const std::string stem = f.filename().string();
        out += stem + ": " + std::to_string(set.size()) + " stories";
        if (!set.story_ids.empty()) out += ", source " + set.source;
        const std::string base = stem.substr(0, stem.size() - std::string("_predictions.csv").size());
        const fs::path truth_path = dir / (base + "_truth.csv");
        if (fs::exists(truth_path)) {
            std::map<std::string, Label> truth;
            for (const auto& [id, l] : read_truth_csv(truth_path)) truth[id] = l;
            std::vector<Label> t, p;
            for (std::size_t i = 0; i < set.size(); ++i)
                if (auto it = truth.find(set.story_ids[i]); it != truth.end()) {
                    t.push_back(it->second);
                    p.push_back(set.labels[i]);
                }
            if (!t.empty()) {
                const auto cm = eval::confusion(t, p);
                out += ", UAR " + format_fixed(eval::uar(cm)) + "\n" + confusion_text(cm);
                continue;
            }
        }
        out += "\n";
    }
    return out;
}

} // namespace affect::app
