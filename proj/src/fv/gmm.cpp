#include "affect/fv/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "affect/common/errors.hpp"
#include "affect/common/parallel.hpp"

namespace affect::fv {
namespace {

constexpr Eigen::Index kBlockRows = 1024;
constexpr double kCollapsedWeight = 1e-8;

struct Stats {
    Eigen::VectorXd n;   // K
    Eigen::MatrixXd s1;  // K x D
    Eigen::MatrixXd s2;  // K x D
    double ll = 0.0;

    Stats(Eigen::Index K, Eigen::Index D) : n(Eigen::VectorXd::Zero(K)), s1(Eigen::MatrixXd::Zero(K, D)), s2(Eigen::MatrixXd::Zero(K, D)) {}
};

// Log densities for a block of rows; `out` is rows x K.
void block_log_densities(const GmmModel& m, const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::MatrixXd& out) {
    const Eigen::Index K = m.num_components();
    const Eigen::Index D = m.dim();
    out.resize(x.rows(), K);
    const double log2pi = std::log(2.0 * std::numbers::pi);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Eigen::RowVectorXd inv = m.variances.row(k).cwiseInverse();
        const double cst = std::log(m.weights(k)) - 0.5 * (D * log2pi + m.variances.row(k).array().log().sum());
        const Eigen::MatrixXd diff = x.rowwise() - m.means.row(k);
        out.col(k) = (cst - 0.5 * (diff.array().square().rowwise() * inv.array()).rowwise().sum()).matrix();
    }
}

// In-place conversion of log densities to posteriors; returns the row log-likelihoods.
Eigen::VectorXd normalize_rows(Eigen::MatrixXd& logp) {
    Eigen::VectorXd ll(logp.rows());
    for (Eigen::Index i = 0; i < logp.rows(); ++i) {
        const double mx = logp.row(i).maxCoeff();
        const double s = (logp.row(i).array() - mx).exp().sum();
        ll(i) = mx + std::log(s);
        logp.row(i) = (logp.row(i).array() - ll(i)).exp().matrix();
    }
    return ll;
}

Stats e_step(const GmmModel& m, const Eigen::MatrixXd& rows) {
    const Eigen::Index N = rows.rows();
    const Eigen::Index K = m.num_components();
    const Eigen::Index D = m.dim();
    const std::size_t blocks = static_cast<std::size_t>((N + kBlockRows - 1) / kBlockRows);
    std::vector<Stats> partial(blocks, Stats(K, D));
    parallel_for(blocks, [&](std::size_t b) {
        const Eigen::Index start = static_cast<Eigen::Index>(b) * kBlockRows;
        const Eigen::Index len = std::min(kBlockRows, N - start);
        const auto x = rows.middleRows(start, len);
        Eigen::MatrixXd gamma;
        block_log_densities(m, x, gamma);
        const Eigen::VectorXd ll = normalize_rows(gamma);
        Stats& st = partial[b];
        st.ll = ll.sum();
        st.n = gamma.colwise().sum().transpose();
        st.s1 = gamma.transpose() * x;
        st.s2 = gamma.transpose() * x.array().square().matrix();
    });
    Stats total(K, D);
    for (const Stats& st : partial) {
        total.n += st.n;
        total.s1 += st.s1;
        total.s2 += st.s2;
        total.ll += st.ll;
    }
    return total;
}

// Returns false when some component collapsed.
bool m_step(const Stats& st, const Eigen::RowVectorXd& floor, Eigen::Index N, GmmModel& m) {
    const Eigen::Index K = m.num_components();
    for (Eigen::Index k = 0; k < K; ++k) {
        const double nk = st.n(k);
        m.weights(k) = nk / static_cast<double>(N);
        if (!(m.weights(k) >= kCollapsedWeight)) return false;
        m.means.row(k) = st.s1.row(k) / nk;
        const Eigen::RowVectorXd var = st.s2.row(k) / nk - m.means.row(k).cwiseAbs2();
        m.variances.row(k) = var.cwiseMax(floor);
    }
    m.weights /= m.weights.sum();
    return true;
}

GmmModel initialize(const Eigen::MatrixXd& rows, int K, std::uint64_t seed, const Eigen::RowVectorXd& global_var,
                    const Eigen::RowVectorXd& floor) {
    const Eigen::Index N = rows.rows();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // k-means++ seeding.
    std::vector<Eigen::Index> centers;
    centers.push_back(static_cast<Eigen::Index>(unit(rng) * N) % N);
    Eigen::VectorXd d2 = (rows.rowwise() - rows.row(centers[0])).rowwise().squaredNorm();
    for (int k = 1; k < K; ++k) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double u = unit(rng) * total;
            double acc = 0.0;
            pick = N - 1;
            for (Eigen::Index i = 0; i < N; ++i) {
                acc += d2(i);
                if (acc > u) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(unit(rng) * N) % N;
        }
        centers.push_back(pick);
        d2 = d2.cwiseMin((rows.rowwise() - rows.row(pick)).rowwise().squaredNorm());
    }

    GmmModel m;
    m.means.resize(K, rows.cols());
    for (int k = 0; k < K; ++k) m.means.row(k) = rows.row(centers[k]);

    // Hard assignment to the seeds gives initial weights and variances.
    Eigen::VectorXd count = Eigen::VectorXd::Zero(K);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(K, rows.cols());
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(K, rows.cols());
    for (Eigen::Index i = 0; i < N; ++i) {
        Eigen::Index best = 0;
        (m.means.rowwise() - rows.row(i)).rowwise().squaredNorm().minCoeff(&best);
        count(best) += 1.0;
        sum.row(best) += rows.row(i);
        sq.row(best) += rows.row(i).cwiseAbs2();
    }
    m.weights = ((count.array() + 1.0) / static_cast<double>(N + K)).matrix();
    m.variances.resize(K, rows.cols());
    for (int k = 0; k < K; ++k) {
        if (count(k) >= 2.0) {
            const Eigen::RowVectorXd mu = sum.row(k) / count(k);
            m.variances.row(k) = (sq.row(k) / count(k) - mu.cwiseAbs2()).cwiseMax(floor);
        } else {
            m.variances.row(k) = global_var.cwiseMax(floor);
        }
    }
    return m;
}

} // namespace

GmmModel fit_gmm(const Eigen::MatrixXd& rows, const GmmOptions& options) {
    const int K = options.components;
    const Eigen::Index N = rows.rows();
    if (K < 1) throw ConfigError("fit_gmm: component count must be positive");
    if (N < K)
        throw DataError("fit_gmm: " + std::to_string(K) + " components requested for only " + std::to_string(N) + " rows");
    if (!rows.allFinite()) throw DataError("fit_gmm: non-finite input");

    const Eigen::RowVectorXd mean = rows.colwise().mean();
    const Eigen::RowVectorXd global_var = (rows.rowwise() - mean).array().square().colwise().mean();
    const Eigen::RowVectorXd floor = (options.variance_floor_ratio * global_var).cwiseMax(1e-10);

    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ull;
        GmmModel m = initialize(rows, K, seed, global_var, floor);
        m.restarts = attempt;
        bool collapsed = false;
        double prev = -std::numeric_limits<double>::infinity();
        for (int it = 0; it < options.max_iterations; ++it) {
            const Stats st = e_step(m, rows);
            m.log_likelihood_history.push_back(st.ll);
            if (it > 0 && (st.ll - prev) <= options.relative_tolerance * std::abs(prev)) {
                m.train_log_likelihood = st.ll;
                return m;
            }
            prev = st.ll;
            if (!m_step(st, floor, N, m)) {
                collapsed = true;
                break;
            }
        }
        if (collapsed) continue;
        m.train_log_likelihood = log_likelihood(m, rows);
        m.log_likelihood_history.push_back(m.train_log_likelihood);
        return m;
    }
    throw NumericalError("fit_gmm: a mixture component collapsed (weight < 1e-8) after re-seeding");
}

Eigen::MatrixXd weighted_log_densities(const GmmModel& model, const Eigen::MatrixXd& rows) {
    if (rows.cols() != model.dim()) throw DataError("GMM: row width does not match model dimension");
    Eigen::MatrixXd out;
    block_log_densities(model, rows, out);
    return out;
}

Eigen::MatrixXd posteriors(const GmmModel& model, const Eigen::MatrixXd& rows) {
    Eigen::MatrixXd p = weighted_log_densities(model, rows);
    normalize_rows(p);
    return p;
}

double log_likelihood(const GmmModel& model, const Eigen::MatrixXd& rows) {
    Eigen::MatrixXd p = weighted_log_densities(model, rows);
    return normalize_rows(p).sum();
}

} // namespace affect::fv
