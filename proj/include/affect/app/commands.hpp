#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "affect/app/config.hpp"
#include "affect/app/synth.hpp"
#include "affect/common/diagnostics.hpp"
#include "affect/eval/cv.hpp"
#include "affect/learn/prediction.hpp"

namespace affect::app {

enum class Modality { Acoustic, Linguistic, Bimodal };

std::string to_string(Modality m);
/// "acoustic", "linguistic" or "bimodal"; throws ConfigError otherwise.
Modality parse_modality(const std::string& s);
/// Bimodal when both modalities are enabled, otherwise the enabled one.
Modality default_modality(const PipelineConfig& config);

/// Outcome of a cross-validated pipeline run.
struct CvRun {
    Task task = Task::Valence;
    Modality modality = Modality::Acoustic;
    std::string source;
    learn::PredictionSet out_of_fold;
    std::vector<Label> truth;
    ClassCounts counts{};
    eval::ConfusionMatrix confusion;
    double uar = 0.0;
    std::vector<double> fold_uar;
    /// Bi-modal weighted fusion: (acoustic, linguistic) weights per fold.
    std::vector<std::vector<double>> fold_weights;
    learn::PredictionSet test;
    std::vector<std::pair<std::string, double>> timings;
    /// Single-modality runs behind a weighted bi-modal fusion.
    std::vector<CvRun> components;
};

/// N-fold CV of the configured pipeline for `modality`. Bi-modal runs use the
/// [fusion] mode: concatenated features, or weighted score fusion of the two
/// single-modality runs with weights chosen per fold on the other folds'
/// out-of-fold predictions (or fixed weights).
CvRun run_cv_pipeline(const PipelineConfig& config, Modality modality, Diagnostics* diag = nullptr);

/// Writes <prefix>_predictions.csv, _truth.csv, _folds.csv, _confusion.csv,
/// _counts.json, _test_predictions.csv (when there are test stories) and
/// _report.txt under the output directory. Returns the prefix path.
std::filesystem::path write_cv_outputs(const PipelineConfig& config, const CvRun& run);

struct NestedRun {
    Task task = Task::Valence;
    Modality modality = Modality::Acoustic;
    eval::NestedResult result;
    std::vector<learn::ModelSpec> grid;
    std::vector<std::pair<std::string, double>> timings;
};

/// Nested CV over the classifier grid of `modality` (bi-modal uses concatenated features).
NestedRun run_nested_pipeline(const PipelineConfig& config, Modality modality, Diagnostics* diag = nullptr);
std::filesystem::path write_nested_outputs(const PipelineConfig& config, const NestedRun& run);

/// Fits the feature pipeline on all labeled stories and writes
/// features_<modality>.csv (story_id followed by named columns) for every story.
std::filesystem::path extract_features(const PipelineConfig& config, Modality modality, Diagnostics* diag = nullptr);

/// Fits LLD PCA, GMM (and FV PCA) on the labeled stories and saves them to `model_dir`.
void fit_fv_models(const PipelineConfig& config, const std::filesystem::path& model_dir, Diagnostics* diag = nullptr);
/// Encodes every story with the models in `model_dir` and writes a FV CSV.
void encode_fv_file(const PipelineConfig& config, const std::filesystem::path& model_dir,
                    const std::filesystem::path& out_csv, Diagnostics* diag = nullptr);

/// counts.json: {"L": n, "M": n, "H": n}
ClassCounts read_counts_json(const std::filesystem::path& path);
void write_counts_json(const std::filesystem::path& path, const ClassCounts& counts);

/// story_id,label
std::vector<std::pair<std::string, Label>> read_truth_csv(const std::filesystem::path& path);

/// Summarizes every *_predictions.csv in `dir`, scoring those with a matching
/// *_truth.csv. Throws DataError("no predictions ...") when there are none.
std::string build_report(const std::filesystem::path& dir);

} // namespace affect::app
