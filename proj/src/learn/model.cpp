#include "affect/learn/model.hpp"

#include "affect/common/container.hpp"
#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"

namespace affect::learn {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Kelm: return "kelm";
        case ModelKind::Wkelm: return "wkelm";
        case ModelKind::Kpls: return "kpls";
        case ModelKind::Wkpls: return "wkpls";
        case ModelKind::RidgeOvr: return "ridge-ovr";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    for (ModelKind k : {ModelKind::Kelm, ModelKind::Wkelm, ModelKind::Kpls, ModelKind::Wkpls, ModelKind::RidgeOvr})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown classifier '" + name + "' (expected kelm, wkelm, kpls, wkpls or ridge-ovr)");
}

std::string ModelSpec::describe() const {
    std::string s = to_string(kind);
    if (kind != ModelKind::RidgeOvr) s += "/" + kernel.describe();
    if (kind == ModelKind::Kpls || kind == ModelKind::Wkpls)
        s += "/L=" + std::to_string(components);
    else
        s += "/C=" + format_real(c_reg);
    return s;
}

namespace {
bool is_kpls(ModelKind k) { return k == ModelKind::Kpls || k == ModelKind::Wkpls; }
} // namespace

TrainedModel fit_model(const ModelSpec& spec, const Eigen::MatrixXd& rows, std::span<const Label> labels) {
    if (rows.rows() != static_cast<Eigen::Index>(labels.size())) throw DataError("fit_model: row/label count mismatch");
    if (rows.rows() == 0) throw DataError("fit_model: no training rows");
    spec.kernel.validate();

    TrainedModel m;
    m.spec = spec;
    for (Label l : labels) ++m.class_counts[index_of(l)];
    int present = 0;
    for (auto c : m.class_counts) present += c > 0 ? 1 : 0;
    if (present < 2) throw DataError("fit_model: training labels cover fewer than two classes");

    m.standardizer = spec.standardize ? Standardizer::fit(rows) : Standardizer::identity(rows.cols());
    const Eigen::MatrixXd x = m.standardizer.apply(rows);
    const Eigen::MatrixXd targets = one_hot(labels);

    switch (spec.kind) {
        case ModelKind::Kelm:
        case ModelKind::Wkelm: {
            const Eigen::MatrixXd k = gram(spec.kernel, x, x);
            Eigen::VectorXd w;
            if (spec.kind == ModelKind::Wkelm) w = class_balance_weights(labels);
            m.coefficients = fit_kelm(k, targets, spec.c_reg, spec.kind == ModelKind::Wkelm ? &w : nullptr);
            m.support = x;
            m.hyperparams["C_reg"] = spec.c_reg;
            break;
        }
        case ModelKind::Kpls:
        case ModelKind::Wkpls: {
            const Eigen::MatrixXd k = gram(spec.kernel, x, x);
            Eigen::VectorXd w;
            if (spec.kind == ModelKind::Wkpls) w = class_balance_weights(labels);
            const int comps = std::min<int>(spec.components, static_cast<int>(x.rows()) - 1);
            if (comps < 1) throw DataError("fit_model: KPLS needs at least two training rows");
            m.kpls = fit_kpls(k, targets, comps, spec.kind == ModelKind::Wkpls ? &w : nullptr);
            m.coefficients = m.kpls.dual;
            m.support = x;
            m.hyperparams["L_components"] = comps;
            break;
        }
        case ModelKind::RidgeOvr: {
            const RidgeSolution r = fit_ridge(x, targets, 1.0 / spec.c_reg);
            m.coefficients = r.weights;
            m.intercept = r.intercept;
            m.hyperparams["lambda"] = 1.0 / spec.c_reg;
            break;
        }
    }
    return m;
}

Eigen::MatrixXd decision_scores(const TrainedModel& model, const Eigen::MatrixXd& rows) {
    if (rows.cols() != model.input_dim())
        throw DataError("predict: feature width " + std::to_string(rows.cols()) + " does not match model width " +
                        std::to_string(model.input_dim()));
    if (rows.rows() == 0) return Eigen::MatrixXd(0, 3);
    const Eigen::MatrixXd x = model.standardizer.apply(rows);
    if (model.spec.kind == ModelKind::RidgeOvr) return (x * model.coefficients).rowwise() + model.intercept;
    const Eigen::MatrixXd k = gram(model.spec.kernel, x, model.support);
    if (is_kpls(model.spec.kind)) return kpls_predict(model.kpls, k);
    return k * model.coefficients;
}

PredictionSet predict(const TrainedModel& model, const Eigen::MatrixXd& rows, std::vector<std::string> story_ids,
                      std::string source) {
    if (story_ids.size() != static_cast<std::size_t>(rows.rows())) throw DataError("predict: id/row count mismatch");
    PredictionSet set;
    set.story_ids = std::move(story_ids);
    set.scores = decision_scores(model, rows);
    set.source = source.empty() ? model.spec.describe() : std::move(source);
    assign_labels(set, model.class_counts);
    return set;
}

void save_model(const std::filesystem::path& path, const TrainedModel& m) {
    Container c("classifier");
    c.set_attribute("kind", to_string(m.spec.kind));
    c.set_attribute("kernel", m.spec.kernel.kind == KernelKind::Linear ? "linear" : "rbf");
    c.set_attribute("standardize", m.spec.standardize ? "1" : "0");
    c.add_scalar("gamma", m.spec.kernel.gamma);
    c.add_scalar("c_reg", m.spec.c_reg);
    c.add_scalar("components", m.spec.components);
    c.add("std_mean", Eigen::MatrixXd(m.standardizer.mean));
    c.add("std_scale", Eigen::MatrixXd(m.standardizer.scale));
    c.add("coefficients", m.coefficients);
    Eigen::VectorXd counts(3);
    for (int i = 0; i < 3; ++i) counts(i) = static_cast<double>(m.class_counts[i]);
    c.add("class_counts", counts);
    if (m.spec.kind == ModelKind::RidgeOvr) {
        c.add("intercept", Eigen::MatrixXd(m.intercept));
    } else {
        c.add("support", m.support);
    }
    if (is_kpls(m.spec.kind)) {
        c.add("kpls_center_weights", m.kpls.center_weights);
        c.add("kpls_kernel_center", m.kpls.kernel_center);
        c.add_scalar("kpls_kernel_mean", m.kpls.kernel_mean);
        c.add("kpls_target_mean", Eigen::MatrixXd(m.kpls.target_mean));
        c.add_scalar("kpls_components", m.kpls.components);
    }
    for (const auto& [k, v] : m.hyperparams) c.add_scalar("hp." + k, v);
    c.save(path);
}

TrainedModel load_model(const std::filesystem::path& path) {
    const Container c = Container::load(path, "classifier");
    TrainedModel m;
    m.spec.kind = parse_model_kind(c.attribute("kind"));
    m.spec.kernel.kind = parse_kernel_kind(c.attribute("kernel"));
    m.spec.kernel.gamma = c.scalar("gamma");
    m.spec.standardize = c.attribute("standardize") == "1";
    m.spec.c_reg = c.scalar("c_reg");
    m.spec.components = static_cast<int>(c.scalar("components"));
    m.standardizer.mean = c.matrix("std_mean").row(0);
    m.standardizer.scale = c.matrix("std_scale").row(0);
    m.coefficients = c.matrix("coefficients");
    const Eigen::VectorXd counts = c.vector("class_counts");
    for (int i = 0; i < 3; ++i) m.class_counts[i] = static_cast<std::size_t>(counts(i));
    if (m.spec.kind == ModelKind::RidgeOvr) {
        m.intercept = c.matrix("intercept").row(0);
    } else {
        m.support = c.matrix("support");
    }
    if (is_kpls(m.spec.kind)) {
        m.kpls.dual = m.coefficients;
        m.kpls.center_weights = c.vector("kpls_center_weights");
        m.kpls.kernel_center = c.vector("kpls_kernel_center");
        m.kpls.kernel_mean = c.scalar("kpls_kernel_mean");
        m.kpls.target_mean = c.matrix("kpls_target_mean").row(0);
        m.kpls.components = static_cast<int>(c.scalar("kpls_components"));
    }
    for (const auto& name : c.section_names())
        if (name.rfind("hp.", 0) == 0) m.hyperparams[name.substr(3)] = c.scalar(name);
    return m;
}

} // namespace affect::learn
