#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "affect/common/label.hpp"
#include "affect/learn/model.hpp"
#include "affect/text/tokenize.hpp"

namespace affect::app {

/// Classifier settings; list-valued entries (c_reg, gamma, components) span
/// the hyper-parameter grid used by nested CV.
struct ClassifierSection {
    learn::ModelKind kind = learn::ModelKind::Kelm;
    learn::KernelKind kernel = learn::KernelKind::Linear;
    std::vector<double> gamma{1.0};
    std::vector<double> c_reg{1.0};
    std::vector<int> components{5};
    bool standardize = true;

    /// Cartesian product c_reg x gamma x components, in that nesting order.
    std::vector<learn::ModelSpec> grid() const;
    /// First grid point.
    learn::ModelSpec first() const { return grid().front(); }
};

struct AcousticSection {
    bool enabled = true;
    int k_gmm = 16;
    double pca_variance = 0.999;
    int k_pca = 0;       // > 0 overrides pca_variance
    int fv_pca_dim = 0;  // > 0 reduces FVs before classification
    bool power_norm = true;
    bool l2_norm = true;
    std::size_t gmm_max_frames = 20000;
    ClassifierSection classifier;
};

enum class SubsetMode { None, Reference, Search };

struct LinguisticSection {
    bool enabled = true;
    /// Any of tfidf, embeddings, sentiws, sentiwordnet, sidecar.
    std::vector<std::string> blocks{"sentiws", "sentiwordnet"};
    std::optional<std::filesystem::path> sentiws;
    std::optional<std::filesystem::path> sentiwordnet;
    std::optional<std::filesystem::path> embeddings;
    std::optional<std::filesystem::path> stopwords;
    text::Language language = text::Language::En;  // TF-IDF and embeddings
    bool tfidf_sublinear = false;
    SubsetMode subset = SubsetMode::None;
    std::size_t subset_max = 6;
    std::size_t subset_folds = 4;
    ClassifierSection classifier;

    bool has_block(const std::string& name) const;
};

enum class FusionMode { Concat, Weighted };

struct FusionSection {
    FusionMode mode = FusionMode::Weighted;
    /// Empty means "search".
    std::vector<double> weights;
    double step = 0.1;
};

struct PipelineConfig {
    std::filesystem::path base_dir;  // directory of the config file
    Task task = Task::Valence;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    std::filesystem::path manifest;
    std::optional<std::filesystem::path> sidecar;
    std::optional<std::filesystem::path> cache_dir;
    AcousticSection acoustic;
    LinguisticSection linguistic;
    ClassifierSection classifier;  // model for concatenated bi-modal features
    FusionSection fusion;
    std::size_t folds = 4;
    std::size_t inner_folds = 3;

    bool bimodal() const { return acoustic.enabled && linguistic.enabled; }
    /// Every effective setting as sorted "section.key=value" lines.
    std::string canonical() const;
    /// 16 hex digits of the FNV-1a 64-bit hash of canonical().
    std::string hash() const;
    /// Throws ConfigError naming the key for missing resources or inconsistent settings.
    void validate() const;
};

/// Parses INI text. Relative paths resolve against `base_dir`. Unknown
/// sections or keys and malformed values are ConfigErrors naming the key.
PipelineConfig parse_config(const std::string& content, const std::filesystem::path& base_dir);

/// Reads, parses and validates a config file.
PipelineConfig load_config(const std::filesystem::path& path);

std::string to_string(SubsetMode mode);
std::string to_string(FusionMode mode);

} // namespace affect::app
