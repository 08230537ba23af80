#include "affect/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"

namespace affect::app {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Section reader that remembers which keys were consumed.
class Section {
public:
    Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (!tree_) return std::nullopt;
        auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        return trim(child->data());
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto v = raw(key);
        return v ? *v : fallback;
    }

    double get_real(const std::string& key, double fallback) {
        auto v = raw(key);
        return v ? to_real(key, *v) : fallback;
    }

    long get_int(const std::string& key, long fallback) {
        auto v = raw(key);
        return v ? to_int(key, *v) : fallback;
    }

    bool get_bool(const std::string& key, bool fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "1" || *v == "on") return true;
        if (*v == "false" || *v == "no" || *v == "0" || *v == "off") return false;
        throw ConfigError(where(key) + ": expected a boolean, got '" + *v + "'");
    }

    std::vector<double> get_reals(const std::string& key, std::vector<double> fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        std::vector<double> out;
        for (const auto& item : split_list(*v)) out.push_back(to_real(key, item));
        if (out.empty()) throw ConfigError(where(key) + ": empty list");
        return out;
    }

    std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        std::vector<int> out;
        for (const auto& item : split_list(*v)) out.push_back(static_cast<int>(to_int(key, item)));
        if (out.empty()) throw ConfigError(where(key) + ": empty list");
        return out;
    }

    /// Throws on keys that were never consumed (typos, unsupported settings).
    void reject_unknown() const {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_)
            if (!used_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }

    double to_real(const std::string& key, const std::string& text) const {
        double v = 0.0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || p != text.data() + text.size())
            throw ConfigError(where(key) + ": expected a number, got '" + text + "'");
        return v;
    }

    long to_int(const std::string& key, const std::string& text) const {
        long v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || p != text.data() + text.size())
            throw ConfigError(where(key) + ": expected an integer, got '" + text + "'");
        return v;
    }

private:
    std::string name_;
    const pt::ptree* tree_;
    std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

std::optional<std::filesystem::path> optional_path(Section& s, const std::string& key,
                                                   const std::filesystem::path& base) {
    auto v = s.raw(key);
    if (!v || v->empty()) return std::nullopt;
    return resolve(base, *v);
}

/// Classifier keys, defaulting to `defaults` when absent.
ClassifierSection read_classifier(Section& s, const ClassifierSection& defaults, const std::string& kind_key) {
    ClassifierSection c = defaults;
    try {
        if (auto v = s.raw(kind_key)) c.kind = learn::parse_model_kind(*v);
        if (auto v = s.raw("kernel")) c.kernel = learn::parse_kernel_kind(*v);
    } catch (const std::exception& e) {
        throw ConfigError(s.where(kind_key) + ": " + e.what());
    }
    c.gamma = s.get_reals("gamma", c.gamma);
    c.c_reg = s.get_reals("c_reg", c.c_reg);
    c.components = s.get_ints("components", c.components);
    c.standardize = s.get_bool("standardize", c.standardize);
    for (double g : c.gamma)
        if (!(g > 0.0)) throw ConfigError(s.where("gamma") + ": must be positive");
    for (double r : c.c_reg)
        if (!(r > 0.0)) throw ConfigError(s.where("c_reg") + ": must be positive");
    for (int l : c.components)
        if (l < 1) throw ConfigError(s.where("components") + ": must be at least 1");
    return c;
}

std::string join_reals(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

void dump_classifier(std::map<std::string, std::string>& kv, const std::string& prefix, const ClassifierSection& c) {
    kv[prefix + (prefix == "classifier" ? ".kind" : ".classifier")] = learn::to_string(c.kind);
    kv[prefix + ".kernel"] = c.kernel == learn::KernelKind::Linear ? "linear" : "rbf";
    kv[prefix + ".gamma"] = join_reals(c.gamma);
    kv[prefix + ".c_reg"] = join_reals(c.c_reg);
    kv[prefix + ".components"] = join_ints(c.components);
    kv[prefix + ".standardize"] = c.standardize ? "true" : "false";
}

/// Paths inside the config directory are listed relative to it, so a copied corpus hashes the same.
std::string path_string(const std::filesystem::path& base, const std::filesystem::path& p) {
    const std::filesystem::path rel = p.lexically_relative(base);
    if (base.empty() || rel.empty() || *rel.begin() == "..") return p.generic_string();
    return rel.generic_string();
}

std::string path_string(const std::filesystem::path& base, const std::optional<std::filesystem::path>& p) {
    return p ? path_string(base, *p) : "";
}

} // namespace

std::vector<learn::ModelSpec> ClassifierSection::grid() const {
    std::vector<learn::ModelSpec> out;
    for (double c : c_reg)
        for (double g : gamma)
            for (int l : components) {
                learn::ModelSpec spec;
                spec.kind = kind;
                spec.kernel = kernel == learn::KernelKind::Linear ? learn::KernelSpec::linear() : learn::KernelSpec::rbf(g);
                spec.c_reg = c;
                spec.components = l;
                spec.standardize = standardize;
                out.push_back(spec);
            }
    return out;
}

bool LinguisticSection::has_block(const std::string& name) const {
    return std::find(blocks.begin(), blocks.end(), name) != blocks.end();
}

std::string to_string(SubsetMode mode) {
    switch (mode) {
    case SubsetMode::None: return "none";
    case SubsetMode::Reference: return "reference";
    case SubsetMode::Search: return "search";
    }
    return "none";
}

std::string to_string(FusionMode mode) { return mode == FusionMode::Concat ? "concat" : "weighted"; }

PipelineConfig parse_config(const std::string& content, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(content);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    static const std::set<std::string> known{"run", "corpus", "acoustic", "linguistic", "classifier", "fusion", "cv"};
    for (const auto& [name, child] : tree) {
        if (!known.count(name)) throw ConfigError("config: unknown section [" + name + "]");
        if (!child.data().empty()) throw ConfigError("config: key '" + name + "' outside of a section");
    }
    auto section = [&](const std::string& name) {
        auto child = tree.get_child_optional(pt::ptree::path_type(name, '\0'));
        return Section(name, child ? &*child : nullptr);
    };

    PipelineConfig cfg;
    cfg.base_dir = base_dir;

    Section run = section("run");
    try {
        cfg.task = parse_task(run.get_string("task", "valence"));
    } catch (const std::exception& e) {
        throw ConfigError(run.where("task") + ": " + e.what());
    }
    const long seed = run.get_int("seed", 0);
    if (seed < 0) throw ConfigError(run.where("seed") + ": must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.output_dir = resolve(base_dir, run.get_string("output_dir", "out"));
    run.reject_unknown();

    Section corpus = section("corpus");
    const auto manifest = corpus.raw("manifest");
    if (!manifest || manifest->empty()) throw ConfigError(corpus.where("manifest") + ": required");
    cfg.manifest = resolve(base_dir, *manifest);
    cfg.sidecar = optional_path(corpus, "sidecar", base_dir);
    cfg.cache_dir = optional_path(corpus, "cache_dir", base_dir);
    corpus.reject_unknown();

    Section classifier = section("classifier");
    cfg.classifier = read_classifier(classifier, ClassifierSection{}, "kind");
    classifier.reject_unknown();

    Section ac = section("acoustic");
    auto& a = cfg.acoustic;
    a.enabled = ac.get_bool("enabled", true);
    a.k_gmm = static_cast<int>(ac.get_int("k_gmm", a.k_gmm));
    a.pca_variance = ac.get_real("pca_variance", a.pca_variance);
    a.k_pca = static_cast<int>(ac.get_int("k_pca", a.k_pca));
    a.fv_pca_dim = static_cast<int>(ac.get_int("fv_pca_dim", a.fv_pca_dim));
    a.power_norm = ac.get_bool("power_norm", a.power_norm);
    a.l2_norm = ac.get_bool("l2_norm", a.l2_norm);
    const long max_frames = ac.get_int("gmm_max_frames", static_cast<long>(a.gmm_max_frames));
    if (max_frames < 1) throw ConfigError(ac.where("gmm_max_frames") + ": must be positive");
    a.gmm_max_frames = static_cast<std::size_t>(max_frames);
    a.classifier = read_classifier(ac, cfg.classifier, "classifier");
    if (a.k_gmm < 1) throw ConfigError(ac.where("k_gmm") + ": must be positive");
    if (!(a.pca_variance > 0.0 && a.pca_variance <= 1.0))
        throw ConfigError(ac.where("pca_variance") + ": must lie in (0, 1]");
    if (a.k_pca < 0) throw ConfigError(ac.where("k_pca") + ": must be non-negative");
    if (a.fv_pca_dim < 0) throw ConfigError(ac.where("fv_pca_dim") + ": must be non-negative");
    ac.reject_unknown();

    Section li = section("linguistic");
    auto& l = cfg.linguistic;
    l.enabled = li.get_bool("enabled", true);
    if (auto v = li.raw("blocks")) l.blocks = split_list(*v);
    static const std::set<std::string> known_blocks{"tfidf", "embeddings", "sentiws", "sentiwordnet", "sidecar"};
    for (const auto& b : l.blocks)
        if (!known_blocks.count(b)) throw ConfigError(li.where("blocks") + ": unknown block '" + b + "'");
    if (l.enabled && l.blocks.empty()) throw ConfigError(li.where("blocks") + ": no blocks enabled");
    l.sentiws = optional_path(li, "sentiws", base_dir);
    l.sentiwordnet = optional_path(li, "sentiwordnet", base_dir);
    l.embeddings = optional_path(li, "embeddings", base_dir);
    l.stopwords = optional_path(li, "stopwords", base_dir);
    try {
        l.language = text::parse_language(li.get_string("language", "en"));
    } catch (const ConfigError& e) {
        throw ConfigError(li.where("language") + ": " + e.what());
    }
    l.tfidf_sublinear = li.get_bool("tfidf_sublinear", false);
    const std::string subset = li.get_string("subset", "none");
    if (subset == "none")
        l.subset = SubsetMode::None;
    else if (subset == "reference")
        l.subset = SubsetMode::Reference;
    else if (subset == "search")
        l.subset = SubsetMode::Search;
    else
        throw ConfigError(li.where("subset") + ": expected none, reference or search");
    const long subset_max = li.get_int("subset_max", 6);
    const long subset_folds = li.get_int("subset_folds", 4);
    if (subset_max < 1) throw ConfigError(li.where("subset_max") + ": must be positive");
    if (subset_folds < 2) throw ConfigError(li.where("subset_folds") + ": must be at least 2");
    l.subset_max = static_cast<std::size_t>(subset_max);
    l.subset_folds = static_cast<std::size_t>(subset_folds);
    l.classifier = read_classifier(li, cfg.classifier, "classifier");
    li.reject_unknown();

    Section fu = section("fusion");
    const std::string mode = fu.get_string("mode", "weighted");
    if (mode == "concat")
        cfg.fusion.mode = FusionMode::Concat;
    else if (mode == "weighted")
        cfg.fusion.mode = FusionMode::Weighted;
    else
        throw ConfigError(fu.where("mode") + ": expected concat or weighted");
    const std::string weights = fu.get_string("weights", "search");
    if (weights != "search") {
        cfg.fusion.weights = fu.get_reals("weights", {});
        double sum = 0.0;
        for (double w : cfg.fusion.weights) {
            if (!(w >= 0.0)) throw ConfigError(fu.where("weights") + ": must be non-negative");
            sum += w;
        }
        if (cfg.fusion.weights.size() != 2 || std::abs(sum - 1.0) > 1e-9)
            throw ConfigError(fu.where("weights") + ": expected two weights (acoustic, linguistic) summing to 1");
    }
    cfg.fusion.step = fu.get_real("step", 0.1);
    fu.reject_unknown();

    Section cv = section("cv");
    const long folds = cv.get_int("folds", 4);
    const long inner = cv.get_int("inner_folds", 3);
    if (folds < 2) throw ConfigError(cv.where("folds") + ": must be at least 2");
    if (inner < 2) throw ConfigError(cv.where("inner_folds") + ": must be at least 2");
    cfg.folds = static_cast<std::size_t>(folds);
    cfg.inner_folds = static_cast<std::size_t>(inner);
    cv.reject_unknown();
    return cfg;
}

void PipelineConfig::validate() const {
    if (!acoustic.enabled && !linguistic.enabled)
        throw ConfigError("[acoustic] enabled / [linguistic] enabled: at least one modality must be enabled");
    auto require = [](const std::optional<std::filesystem::path>& p, const std::string& key) {
        if (!p) throw ConfigError(key + ": required by the enabled settings");
        if (!std::filesystem::exists(*p)) throw ConfigError(key + ": file not found: " + p->string());
    };
    if (!std::filesystem::exists(manifest)) throw ConfigError("[corpus] manifest: file not found: " + manifest.string());
    if (sidecar && !std::filesystem::exists(*sidecar))
        throw ConfigError("[corpus] sidecar: file not found: " + sidecar->string());
    if (linguistic.enabled) {
        if (linguistic.has_block("sentiws")) require(linguistic.sentiws, "[linguistic] sentiws");
        if (linguistic.has_block("sentiwordnet")) require(linguistic.sentiwordnet, "[linguistic] sentiwordnet");
        if (linguistic.has_block("embeddings")) require(linguistic.embeddings, "[linguistic] embeddings");
        if (linguistic.has_block("sidecar") && !sidecar)
            throw ConfigError("[corpus] sidecar: required by the sidecar block");
        if (linguistic.stopwords) require(linguistic.stopwords, "[linguistic] stopwords");
        if (linguistic.subset != SubsetMode::None &&
            !(linguistic.has_block("sentiws") && linguistic.has_block("sentiwordnet")))
            throw ConfigError("[linguistic] subset: needs both the sentiws and sentiwordnet blocks");
    }
    if (fusion.mode == FusionMode::Weighted && fusion.weights.empty()) {
        const double parts = 1.0 / fusion.step;
        if (!(fusion.step > 0.0) || std::abs(parts - std::round(parts)) > 1e-9)
            throw ConfigError("[fusion] step: must divide 1");
    }
}

std::string PipelineConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["run.task"] = std::string(to_string(task));
    kv["run.seed"] = std::to_string(seed);
    kv["run.output_dir"] = path_string(base_dir, output_dir);
    kv["corpus.manifest"] = path_string(base_dir, manifest);
    kv["corpus.sidecar"] = path_string(base_dir, sidecar);
    kv["corpus.cache_dir"] = path_string(base_dir, cache_dir);
    kv["acoustic.enabled"] = acoustic.enabled ? "true" : "false";
    kv["acoustic.k_gmm"] = std::to_string(acoustic.k_gmm);
    kv["acoustic.pca_variance"] = format_real(acoustic.pca_variance);
    kv["acoustic.k_pca"] = std::to_string(acoustic.k_pca);
    kv["acoustic.fv_pca_dim"] = std::to_string(acoustic.fv_pca_dim);
    kv["acoustic.power_norm"] = acoustic.power_norm ? "true" : "false";
    kv["acoustic.l2_norm"] = acoustic.l2_norm ? "true" : "false";
    kv["acoustic.gmm_max_frames"] = std::to_string(acoustic.gmm_max_frames);
    dump_classifier(kv, "acoustic", acoustic.classifier);
    kv["linguistic.enabled"] = linguistic.enabled ? "true" : "false";
    std::string blocks;
    for (std::size_t i = 0; i < linguistic.blocks.size(); ++i) blocks += (i ? "," : "") + linguistic.blocks[i];
    kv["linguistic.blocks"] = blocks;
    kv["linguistic.sentiws"] = path_string(base_dir, linguistic.sentiws);
    kv["linguistic.sentiwordnet"] = path_string(base_dir, linguistic.sentiwordnet);
    kv["linguistic.embeddings"] = path_string(base_dir, linguistic.embeddings);
    kv["linguistic.stopwords"] = path_string(base_dir, linguistic.stopwords);
    kv["linguistic.language"] = std::string(text::to_string(linguistic.language));
    kv["linguistic.tfidf_sublinear"] = linguistic.tfidf_sublinear ? "true" : "false";
    kv["linguistic.subset"] = to_string(linguistic.subset);
    kv["linguistic.subset_max"] = std::to_string(linguistic.subset_max);
    kv["linguistic.subset_folds"] = std::to_string(linguistic.subset_folds);
    dump_classifier(kv, "linguistic", linguistic.classifier);
    dump_classifier(kv, "classifier", classifier);
    kv["fusion.mode"] = to_string(fusion.mode);
    kv["fusion.weights"] = fusion.weights.empty() ? "search" : join_reals(fusion.weights);
    kv["fusion.step"] = format_real(fusion.step);
    kv["cv.folds"] = std::to_string(folds);
    kv["cv.inner_folds"] = std::to_string(inner_folds);
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string PipelineConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    PipelineConfig cfg = parse_config(read_text_file(path), path.parent_path().empty() ? "." : path.parent_path());
    cfg.validate();
    return cfg;
}

} // namespace affect::app
