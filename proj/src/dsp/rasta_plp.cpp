#include <cmath>
#include <numbers>
#include <sstream>

#include "affect/common/errors.hpp"
#include "affect/dsp/lld.hpp"

namespace affect::dsp {
namespace {

constexpr double kLogFloor = 1e-10;
// Band-pass RASTA filter: FIR part over the last five frames, single pole.
constexpr double kRastaNumerator[5] = {0.2, 0.1, 0.0, -0.1, -0.2};
constexpr double kRastaPole = 0.94;
constexpr double kCompression = 0.33;

double hz_to_bark(double hz) { return 6.0 * std::asinh(hz / 600.0); }
double bark_to_hz(double bark) { return 600.0 * std::sinh(bark / 6.0); }

// Critical-band weights (bands x bins): 1-Bark wide trapezoids with the usual
// asymmetric skirts (10^(2.5 * lower-edge distance) below, 10^(-upper distance) above).
Eigen::MatrixXd bark_filterbank(int fft_size, int sample_rate, int& bands) {
    const double nyq_bark = hz_to_bark(sample_rate / 2.0);
    bands = static_cast<int>(std::ceil(nyq_bark)) + 1;
    const double step = nyq_bark / (bands - 1);
    const int bins = fft_size / 2 + 1;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(bands, bins);
    for (int b = 0; b < bands; ++b) {
        const double mid = b * step;
        for (int k = 0; k < bins; ++k) {
            const double fb = hz_to_bark(static_cast<double>(k) * sample_rate / fft_size);
            const double lof = fb - mid - 0.5;
            const double hif = fb - mid + 0.5;
            w(b, k) = std::pow(10.0, std::min(0.0, std::min(hif, -2.5 * lof)));
        }
    }
    return w;
}

// Equal-loudness weights at band centre frequencies.
std::vector<double> equal_loudness(int bands, int sample_rate) {
    const double nyq_bark = hz_to_bark(sample_rate / 2.0);
    std::vector<double> eql(static_cast<std::size_t>(bands));
    for (int b = 0; b < bands; ++b) {
        const double f = bark_to_hz(nyq_bark * b / (bands - 1));
        const double fsq = f * f;
        const double ftmp = fsq + 1.6e5;
        eql[b] = (fsq / ftmp) * (fsq / ftmp) * ((fsq + 1.44e6) / (fsq + 9.61e6));
    }
    return eql;
}

// In place along time (rows). History before frame 0 replicates frame 0, so a
// constant trajectory filters to exactly zero from the first frame.
void rasta_filter(Eigen::MatrixXd& logbands) {
    const Eigen::Index T = logbands.rows();
    for (Eigen::Index b = 0; b < logbands.cols(); ++b) {
        const Eigen::VectorXd x = logbands.col(b);
        double prev = 0.0;
        for (Eigen::Index t = 0; t < T; ++t) {
            double acc = 0.0;
            for (int k = 0; k < 5; ++k) acc += kRastaNumerator[k] * x(std::max<Eigen::Index>(t - k, 0));
            prev = acc + kRastaPole * prev;
            logbands(t, b) = prev;
        }
    }
}

} // namespace

namespace detail {

std::vector<double> levinson_durbin(std::span<const double> r, int order, double& error) {
    std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0), prev(a.size());
    a[0] = 1.0;
    error = r[0];
    for (int i = 1; i <= order; ++i) {
        if (!(error > 0.0)) return a;
        double acc = r[i];
        for (int j = 1; j < i; ++j) acc += a[j] * r[i - j];
        const double k = -acc / error;
        prev = a;
        for (int j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
        a[i] = k;
        error *= (1.0 - k * k);
    }
    return a;
}

std::vector<double> lpc_to_cepstrum(std::span<const double> a, double error, int num_ceps) {
    std::vector<double> c(static_cast<std::size_t>(num_ceps), 0.0);
    c[0] = std::log(error);
    const int order = static_cast<int>(a.size()) - 1;
    for (int n = 1; n < num_ceps; ++n) {
        double sum = 0.0;
        for (int m = 1; m < n; ++m)
            if (m <= order) sum += (n - m) * a[m] * c[n - m];
        const double an = n <= order ? a[n] : 0.0;
        c[n] = -(an + sum / n);
    }
    return c;
}

} // namespace detail

LldMatrix extract_rasta_plp(const corpus::AudioSegment& seg, const FrameConfig& cfg) {
    const Eigen::MatrixXd power = detail::power_spectra(seg, cfg);
    int bands = 0;
    const Eigen::MatrixXd fb = bark_filterbank(cfg.fft_size, seg.sample_rate_hz, bands);
    const std::vector<double> eql = equal_loudness(bands, seg.sample_rate_hz);

    Eigen::MatrixXd aud = (power * fb.transpose()).array().max(kLogFloor).log().matrix();
    rasta_filter(aud);
    aud = aud.array().exp().matrix();
    for (Eigen::Index t = 0; t < aud.rows(); ++t) {
        for (int b = 0; b < bands; ++b) aud(t, b) = std::pow(aud(t, b) * eql[b], kCompression);
        // Edge bands carry no equal-loudness mass; copy their neighbours.
        aud(t, 0) = aud(t, 1);
        aud(t, bands - 1) = aud(t, bands - 2);
    }

    LldMatrix out;
    out.frames.resize(aud.rows(), kNumPlpCepstra);
    out.frame_hop_s = cfg.hop_s;
    const int M = 2 * (bands - 1);
    std::vector<double> r(kLpOrder + 1);
    for (Eigen::Index t = 0; t < aud.rows(); ++t) {
        // Autocorrelation = inverse DFT of the mirrored auditory spectrum.
        for (int k = 0; k <= kLpOrder; ++k) {
            double acc = aud(t, 0) + ((k % 2) ? -aud(t, bands - 1) : aud(t, bands - 1));
            for (int j = 1; j < bands - 1; ++j) acc += 2.0 * aud(t, j) * std::cos(std::numbers::pi * j * k / (bands - 1));
            r[k] = acc / M;
        }
        double err = 0.0;
        const std::vector<double> a = detail::levinson_durbin(r, kLpOrder, err);
        if (!(err > 0.0) || !std::isfinite(err)) {
            std::ostringstream msg;
            msg << "RASTA-PLP: unstable LP model at frame " << t << " (prediction error " << err << ")";
            throw NumericalError(msg.str());
        }
        const std::vector<double> c = detail::lpc_to_cepstrum(a, err, kNumPlpCepstra);
        for (int i = 0; i < kNumPlpCepstra; ++i) out.frames(t, i) = c[i];
    }
    for (int i = 0; i < kNumPlpCepstra; ++i) out.descriptor_names.push_back("plp_" + std::to_string(i));
    return out;
}

} // namespace affect::dsp
