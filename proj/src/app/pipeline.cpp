#include "affect/app/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "affect/common/errors.hpp"
#include "affect/common/parallel.hpp"
#include "affect/fv/fisher.hpp"
#include "affect/text/features.hpp"
#include "affect/text/subset_selection.hpp"

namespace affect::app {

namespace fs = std::filesystem;

namespace {

class ScopedStage {
public:
    ScopedStage(StageTimings* t, std::string name)
        : timings_(t), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
    ~ScopedStage() {
        if (timings_)
            timings_->add(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    }

private:
    StageTimings* timings_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

} // namespace

void StageTimings::add(const std::string& stage, double seconds) {
    std::lock_guard lock(mutex_);
    for (auto& [name, total] : entries_)
        if (name == stage) {
            total += seconds;
            return;
        }
    entries_.emplace_back(stage, seconds);
}

std::vector<std::pair<std::string, double>> StageTimings::totals() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

corpus::Corpus load_corpus(const PipelineConfig& config, Diagnostics* diag) {
    corpus::Corpus c = corpus::load_manifest(config.manifest);
    if (config.sidecar) c = corpus::load_sidecar(*config.sidecar, std::move(c), diag);
    return c;
}

// ---------------------------------------------------------------- acoustic

AcousticFeatures::AcousticFeatures(const corpus::Corpus& corpus, AcousticSection settings, std::uint64_t seed,
                                   std::optional<fs::path> cache_dir, Diagnostics* diag, StageTimings* timings)
    : settings_(std::move(settings)), seed_(seed), lld_(corpus.size()), diag_(diag), timings_(timings) {
    ScopedStage stage(timings_, "lld extraction");
    if (cache_dir) fs::create_directories(*cache_dir / "lld");
    const dsp::FrameConfig frame_config;
    parallel_for(corpus.size(), [&](std::size_t i) {
        const auto& story = corpus[i];
        try {
            if (cache_dir) {
                const fs::path p = *cache_dir / "lld" / (story.story_id + ".lld");
                if (fs::exists(p)) {
                    lld_[i] = dsp::load_lld_cache(p);
                    return;
                }
                lld_[i] = dsp::extract_story_lld(story.audio_chunks, frame_config);
                dsp::save_lld_cache(p, lld_[i]);
            } else {
                lld_[i] = dsp::extract_story_lld(story.audio_chunks, frame_config);
            }
        } catch (const DataError& e) {
            throw DataError("story '" + story.story_id + "': " + e.what());
        }
    });
}

Eigen::MatrixXd AcousticFeatures::background_frames(std::span<const std::size_t> stories) const {
    Eigen::Index total = 0, dim = 0;
    for (std::size_t s : stories) {
        total += lld_[s].num_frames();
        dim = lld_[s].dim();
    }
    if (total == 0) throw DataError("no acoustic frames in the training stories");
    const auto max_frames = static_cast<Eigen::Index>(settings_.gmm_max_frames);
    const Eigen::Index stride = (total + max_frames - 1) / max_frames;
    Eigen::MatrixXd out((total + stride - 1) / stride, dim);
    Eigen::Index global = 0, row = 0;
    for (std::size_t s : stories) {
        const auto& f = lld_[s].frames;
        for (Eigen::Index t = 0; t < f.rows(); ++t, ++global)
            if (global % stride == 0) out.row(row++) = f.row(t);
    }
    return out;
}

AcousticFeatures::Fitted AcousticFeatures::fit(std::span<const std::size_t> train) const {
    Fitted fitted;
    const Eigen::MatrixXd frames = background_frames(train);
    {
        ScopedStage stage(timings_, "lld pca");
        const fv::PcaTarget target = settings_.k_pca > 0 ? fv::PcaTarget(fv::ComponentCount{settings_.k_pca})
                                                         : fv::PcaTarget(fv::VarianceFraction{settings_.pca_variance});
        fitted.lld_pca = fv::fit_pca(frames, target, diag_);
    }
    {
        ScopedStage stage(timings_, "gmm");
        fv::GmmOptions options;
        options.components = settings_.k_gmm;
        options.seed = seed_;
        fitted.gmm = fv::fit_gmm(fv::apply_pca(fitted.lld_pca, frames), options);
    }
    if (settings_.fv_pca_dim > 0) {
        const Fitted partial{fitted.lld_pca, fitted.gmm, std::nullopt};
        const Eigen::MatrixXd fvs = encode(partial, train);
        ScopedStage stage(timings_, "fv pca");
        fitted.fv_pca = fv::fit_pca(fvs, fv::ComponentCount{settings_.fv_pca_dim}, diag_);
    }
    return fitted;
}

Eigen::MatrixXd AcousticFeatures::encode(const Fitted& fitted, std::span<const std::size_t> rows) const {
    ScopedStage stage(timings_, "fv encoding");
    const Eigen::Index dim = 2 * fitted.gmm.means.rows() * fitted.gmm.means.cols();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), dim);
    parallel_for(rows.size(), [&](std::size_t r) {
        const Eigen::MatrixXd projected = fv::apply_pca(fitted.lld_pca, lld_[rows[r]].frames);
        const auto v = fv::normalize_fv(fv::encode_fv(fitted.gmm, projected), settings_.power_norm, settings_.l2_norm);
        out.row(static_cast<Eigen::Index>(r)) = v.values.transpose();
    });
    if (fitted.fv_pca) return fv::apply_pca(*fitted.fv_pca, out);
    return out;
}

std::vector<std::string> AcousticFeatures::feature_names(const Fitted& fitted) const {
    std::vector<std::string> names;
    if (fitted.fv_pca) {
        for (Eigen::Index i = 0; i < fitted.fv_pca->output_dim(); ++i) names.push_back("fv.pc" + std::to_string(i));
        return names;
    }
    for (Eigen::Index k = 0; k < fitted.gmm.means.rows(); ++k) {
        for (Eigen::Index d = 0; d < fitted.gmm.means.cols(); ++d)
            names.push_back("fv.k" + std::to_string(k) + ".mu" + std::to_string(d));
        for (Eigen::Index d = 0; d < fitted.gmm.means.cols(); ++d)
            names.push_back("fv.k" + std::to_string(k) + ".sigma" + std::to_string(d));
    }
    return names;
}

eval::FeatureSplit AcousticFeatures::operator()(const eval::FeatureRequest& request) const {
    const Fitted fitted = fit(request.train);
    return {encode(fitted, request.train), encode(fitted, request.eval)};
}

// ---------------------------------------------------------------- linguistic

LinguisticFeatures::LinguisticFeatures(const corpus::Corpus& corpus, LinguisticSection settings, std::uint64_t seed,
                                       Diagnostics* diag, StageTimings* timings)
    : settings_(std::move(settings)), seed_(seed), timings_(timings) {
    ScopedStage stage(timings_, "linguistic extraction");
    speakers_ = eval::CvDataset::from_corpus(corpus, Task::Valence);
    const std::size_t n = corpus.size();
    stop_words_ = settings_.stopwords ? text::StopWords::load(*settings_.stopwords)
                                      : text::StopWords::bundled(settings_.language);
    for (const auto& story : corpus.stories())
        tokens_.push_back(text::tokenize(
            settings_.language == text::Language::En ? story.transcript_en : story.transcript_de, settings_.language));

    std::optional<text::SentiWsLexicon> sentiws;
    std::optional<text::SentiWordNetLexicon> swn;
    if (settings_.has_block("sentiws")) sentiws = text::load_sentiws(*settings_.sentiws, diag);
    if (settings_.has_block("sentiwordnet")) swn = text::load_sentiwordnet(*settings_.sentiwordnet, diag);
    std::vector<std::vector<double>> dict_rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        text::FeatureVector v;
        if (sentiws) v.add(text::sentiws_features(*sentiws, text::tokenize(corpus[i].transcript_de, text::Language::De)));
        if (swn)
            v.add(text::sentiwordnet_features(*swn, text::tokenize(corpus[i].transcript_en, text::Language::En, true)));
        dict_rows[i] = v.values();
        if (i == 0) dictionary_names_ = v.names();
    }
    dictionary_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dictionary_names_.size()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < dictionary_names_.size(); ++c)
            dictionary_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = dict_rows[i][c];

    if (settings_.has_block("embeddings")) {
        const auto table = text::load_embeddings(*settings_.embeddings, diag);
        embeddings_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(table.dim));
        for (std::size_t i = 0; i < n; ++i)
            embeddings_.row(static_cast<Eigen::Index>(i)) = text::embed_average(table, tokens_[i], diag).transpose();
    }
    if (settings_.has_block("sidecar")) {
        sidecar_names_ = corpus.sidecar_names();
        if (sidecar_names_.empty()) throw DataError("sidecar block enabled but no sidecar features were loaded");
        sidecar_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sidecar_names_.size()));
        for (std::size_t i = 0; i < n; ++i) {
            if (corpus[i].sidecar.empty()) {
                warn(diag, "story '" + corpus[i].story_id + "' has no sidecar row; using zeros");
                continue;
            }
            for (std::size_t c = 0; c < sidecar_names_.size(); ++c)
                sidecar_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = corpus[i].sidecar[c];
        }
    }
}

LinguisticFeatures::Fitted LinguisticFeatures::fit(std::span<const std::size_t> train,
                                                   std::span<const Label> train_labels) const {
    Fitted fitted;
    if (settings_.has_block("tfidf")) {
        ScopedStage stage(timings_, "tfidf");
        std::vector<text::TokenSeq> docs;
        for (std::size_t i : train) docs.push_back(tokens_[i]);
        fitted.tfidf = text::fit_tfidf(docs, settings_.language, stop_words_,
                                       text::TfidfOptions{settings_.language == text::Language::En,
                                                          settings_.tfidf_sublinear});
    }
    switch (settings_.subset) {
    case SubsetMode::None:
        fitted.dictionary_columns = all_rows(dictionary_names_.size());
        break;
    case SubsetMode::Reference:
        for (const auto& name : text::reference_dictionary_subset()) {
            auto it = std::find(dictionary_names_.begin(), dictionary_names_.end(), name);
            if (it == dictionary_names_.end()) throw ConfigError("[linguistic] subset: feature '" + name + "' unavailable");
            fitted.dictionary_columns.push_back(static_cast<std::size_t>(it - dictionary_names_.begin()));
        }
        break;
    case SubsetMode::Search: {
        ScopedStage stage(timings_, "dictionary subset search");
        text::SubsetSearchOptions options;
        options.max_size = settings_.subset_max;
        options.folds = settings_.subset_folds;
        options.seed = seed_;
        const auto result = text::select_feature_subset(select_rows(dictionary_, train), dictionary_names_, speakers_,
                                                        train, train_labels, options);
        for (const auto& name : result.names)
            fitted.dictionary_columns.push_back(static_cast<std::size_t>(
                std::find(dictionary_names_.begin(), dictionary_names_.end(), name) - dictionary_names_.begin()));
        break;
    }
    }
    return fitted;
}

Eigen::MatrixXd LinguisticFeatures::encode(const Fitted& fitted, std::span<const std::size_t> rows) const {
    std::vector<Eigen::MatrixXd> parts;
    for (const auto& block : settings_.blocks) {
        if (block == "tfidf") {
            Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(fitted.tfidf->dim()));
            for (std::size_t r = 0; r < rows.size(); ++r)
                m.row(static_cast<Eigen::Index>(r)) = text::tfidf_transform(*fitted.tfidf, tokens_[rows[r]]).transpose();
            parts.push_back(std::move(m));
        } else if (block == "embeddings") {
            parts.push_back(select_rows(embeddings_, rows));
        } else if (block == "sidecar") {
            parts.push_back(select_rows(sidecar_, rows));
        }
    }
    // Both lexicon blocks share one (possibly subset-selected) dictionary part.
    if (!dictionary_names_.empty()) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(fitted.dictionary_columns.size()));
        for (std::size_t c = 0; c < fitted.dictionary_columns.size(); ++c)
            for (std::size_t r = 0; r < rows.size(); ++r)
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    dictionary_(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(fitted.dictionary_columns[c]));
        parts.push_back(std::move(m));
    }
    Eigen::Index width = 0;
    for (const auto& p : parts) width += p.cols();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), width);
    Eigen::Index col = 0;
    for (const auto& p : parts) {
        out.middleCols(col, p.cols()) = p;
        col += p.cols();
    }
    return out;
}

std::vector<std::string> LinguisticFeatures::feature_names(const Fitted& fitted) const {
    std::vector<std::string> names;
    for (const auto& block : settings_.blocks) {
        if (block == "tfidf")
            for (const auto& term : fitted.tfidf->vocabulary) names.push_back("tfidf." + term);
        else if (block == "embeddings")
            for (Eigen::Index d = 0; d < embeddings_.cols(); ++d) names.push_back("emb." + std::to_string(d));
        else if (block == "sidecar")
            for (const auto& s : sidecar_names_) names.push_back("sidecar." + s);
    }
    for (std::size_t c : fitted.dictionary_columns) names.push_back(dictionary_names_[c]);
    return names;
}

eval::FeatureSplit LinguisticFeatures::operator()(const eval::FeatureRequest& request) const {
    const Fitted fitted = fit(request.train, request.train_labels);
    return {encode(fitted, request.train), encode(fitted, request.eval)};
}

eval::FeatureBuilder concat_builders(eval::FeatureBuilder first, eval::FeatureBuilder second) {
    return [first = std::move(first), second = std::move(second)](const eval::FeatureRequest& req) {
        const auto a = first(req);
        const auto b = second(req);
        eval::FeatureSplit out;
        out.train.resize(a.train.rows(), a.train.cols() + b.train.cols());
        out.train << a.train, b.train;
        out.eval.resize(a.eval.rows(), a.eval.cols() + b.eval.cols());
        out.eval << a.eval, b.eval;
        return out;
    };
}

} // namespace affect::app
