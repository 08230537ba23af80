#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affect/app/config.hpp"
#include "affect/common/diagnostics.hpp"
#include "affect/corpus/corpus.hpp"
#include "affect/dsp/lld.hpp"
#include "affect/eval/cv.hpp"
#include "affect/fv/gmm.hpp"
#include "affect/fv/pca.hpp"
#include "affect/text/embeddings.hpp"
#include "affect/text/lexicon.hpp"
#include "affect/text/stopwords.hpp"
#include "affect/text/tfidf.hpp"

namespace affect::app {

/// Named wall-clock durations, safe to append from several threads.
class StageTimings {
public:
    void add(const std::string& stage, double seconds);
    std::vector<std::pair<std::string, double>> totals() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::pair<std::string, double>> entries_;
};

/// LLD -> PCA -> GMM -> Fisher vector features. LLDs are extracted once per
/// story at construction (read from / written to the cache directory when set);
/// PCA and GMM are fit on the training stories of each request.
class AcousticFeatures {
public:
    struct Fitted {
        fv::PcaModel lld_pca;
        fv::GmmModel gmm;
        std::optional<fv::PcaModel> fv_pca;
    };

    AcousticFeatures(const corpus::Corpus& corpus, AcousticSection settings, std::uint64_t seed,
                     std::optional<std::filesystem::path> cache_dir, Diagnostics* diag, StageTimings* timings = nullptr);

    Fitted fit(std::span<const std::size_t> train) const;
    Eigen::MatrixXd encode(const Fitted& fitted, std::span<const std::size_t> rows) const;
    std::vector<std::string> feature_names(const Fitted& fitted) const;
    eval::FeatureSplit operator()(const eval::FeatureRequest& request) const;

    const dsp::LldMatrix& lld(std::size_t story) const { return lld_[story]; }
    /// LLD rows of the given stories, thinned by a fixed stride to at most gmm_max_frames.
    Eigen::MatrixXd background_frames(std::span<const std::size_t> stories) const;

private:
    AcousticSection settings_;
    std::uint64_t seed_;
    std::vector<dsp::LldMatrix> lld_;
    Diagnostics* diag_;
    StageTimings* timings_;
};

/// Story-level linguistic blocks. Lexicon and embedding features are computed
/// once; TF-IDF and dictionary-subset selection are fit per request.
class LinguisticFeatures {
public:
    struct Fitted {
        std::optional<text::TfidfModel> tfidf;
        std::vector<std::size_t> dictionary_columns;  // into the dictionary matrix
    };

    LinguisticFeatures(const corpus::Corpus& corpus, LinguisticSection settings, std::uint64_t seed,
                       Diagnostics* diag, StageTimings* timings = nullptr);

    Fitted fit(std::span<const std::size_t> train, std::span<const Label> train_labels) const;
    Eigen::MatrixXd encode(const Fitted& fitted, std::span<const std::size_t> rows) const;
    std::vector<std::string> feature_names(const Fitted& fitted) const;
    eval::FeatureSplit operator()(const eval::FeatureRequest& request) const;

    /// SentiWS and SentiWordNet statistics of every story (enabled blocks only).
    const Eigen::MatrixXd& dictionary_matrix() const { return dictionary_; }
    const std::vector<std::string>& dictionary_names() const { return dictionary_names_; }

private:
    LinguisticSection settings_;
    std::uint64_t seed_;
    eval::CvDataset speakers_;
    std::vector<text::TokenSeq> tokens_;  // tokens in the TF-IDF / embedding language
    Eigen::MatrixXd dictionary_;
    std::vector<std::string> dictionary_names_;
    Eigen::MatrixXd embeddings_;
    Eigen::MatrixXd sidecar_;
    std::vector<std::string> sidecar_names_;
    text::StopWords stop_words_;
    StageTimings* timings_;
};

/// Column-wise concatenation of two builders' outputs.
eval::FeatureBuilder concat_builders(eval::FeatureBuilder first, eval::FeatureBuilder second);

/// Loads the manifest and, when configured, the sidecar.
corpus::Corpus load_corpus(const PipelineConfig& config, Diagnostics* diag);

} // namespace affect::app
