#include "affect/fv/model_io.hpp"

#include "affect/common/container.hpp"
#include "affect/common/errors.hpp"

namespace affect::fv {

void save_pca(const std::filesystem::path& path, const PcaModel& model) {
    Container c("pca");
    c.add("mean", model.mean);
    c.add("basis", model.basis);
    c.add("eigenvalues", model.eigenvalues);
    c.add("explained_ratio", model.explained_ratio);
    c.save(path);
}

PcaModel load_pca(const std::filesystem::path& path) {
    const Container c = Container::load(path, "pca");
    PcaModel m;
    m.mean = c.vector("mean");
    m.basis = c.matrix("basis");
    m.eigenvalues = c.vector("eigenvalues");
    m.explained_ratio = c.vector("explained_ratio");
    if (m.basis.rows() != m.mean.size()) throw DataError(path.string() + ": inconsistent PCA shapes");
    return m;
}

void save_gmm(const std::filesystem::path& path, const GmmModel& model) {
    Container c("gmm");
    c.add("weights", model.weights);
    c.add("means", model.means);
    c.add("variances", model.variances);
    c.add_scalar("train_log_likelihood", model.train_log_likelihood);
    c.save(path);
}

GmmModel load_gmm(const std::filesystem::path& path) {
    const Container c = Container::load(path, "gmm");
    GmmModel m;
    m.weights = c.vector("weights");
    m.means = c.matrix("means");
    m.variances = c.matrix("variances");
    m.train_log_likelihood = c.scalar("train_log_likelihood");
    if (m.means.rows() != m.weights.size() || m.variances.rows() != m.means.rows() || m.variances.cols() != m.means.cols())
        throw DataError(path.string() + ": inconsistent GMM shapes");
    return m;
}

} // namespace affect::fv
