#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affect/learn/kernel.hpp"
#include "affect/learn/prediction.hpp"
#include "affect/learn/solvers.hpp"
#include "affect/learn/standardizer.hpp"

namespace affect::learn {

enum class ModelKind { Kelm, Wkelm, Kpls, Wkpls, RidgeOvr };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelSpec {
    ModelKind kind = ModelKind::Kelm;
    KernelSpec kernel;
    double c_reg = 1.0;   // KELM regularization; ridge uses lambda = 1 / c_reg
    int components = 5;   // KPLS latent components
    bool standardize = true;

    std::string describe() const;
};

struct TrainedModel {
    ModelSpec spec;
    Standardizer standardizer;
    Eigen::MatrixXd support;       // standardized training rows (kernel models)
    Eigen::MatrixXd coefficients;  // n x 3 (kernel models) or D x 3 (ridge)
    Eigen::RowVectorXd intercept;  // ridge only
    KplsSolution kpls;             // kpls / wkpls only
    ClassCounts class_counts{};    // training counts, used for argmax ties
    std::map<std::string, double> hyperparams;

    Eigen::Index input_dim() const { return standardizer.width(); }
};

/// Standardizes (optional), builds the kernel and solves for the chosen model.
/// Throws DataError when fewer than two classes are present.
TrainedModel fit_model(const ModelSpec& spec, const Eigen::MatrixXd& rows, std::span<const Label> labels);

/// Raw per-class decision values (n x 3).
Eigen::MatrixXd decision_scores(const TrainedModel& model, const Eigen::MatrixXd& rows);

/// Scores plus argmax labels (ties per argmax_label with the training counts).
PredictionSet predict(const TrainedModel& model, const Eigen::MatrixXd& rows, std::vector<std::string> story_ids,
                      std::string source = {});

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace affect::learn
