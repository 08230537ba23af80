#include <cmath>
#include <numbers>

#include "affect/dsp/lld.hpp"

namespace affect::dsp {
namespace {

constexpr double kLogFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filters on the HTK mel scale spanning 0 .. Nyquist (filters x bins).
Eigen::MatrixXd mel_filterbank(int filters, int fft_size, int sample_rate) {
    const int bins = fft_size / 2 + 1;
    const double top = hz_to_mel(sample_rate / 2.0);
    std::vector<double> edges(static_cast<std::size_t>(filters) + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = mel_to_hz(top * static_cast<double>(i) / static_cast<double>(filters + 1));

    Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(filters, bins);
    for (int m = 0; m < filters; ++m) {
        const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
        for (int k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / fft_size;
            if (f > lo && f < hi) fb(m, k) = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
        }
    }
    return fb;
}

// Orthonormal DCT-II rows 0..count-1 for an input of length n.
Eigen::MatrixXd dct2(int count, int n) {
    Eigen::MatrixXd d(count, n);
    for (int i = 0; i < count; ++i) {
        const double scale = std::sqrt((i == 0 ? 1.0 : 2.0) / n);
        for (int j = 0; j < n; ++j) d(i, j) = scale * std::cos(std::numbers::pi * i * (j + 0.5) / n);
    }
    return d;
}

} // namespace

LldMatrix extract_mfcc(const corpus::AudioSegment& seg, const FrameConfig& cfg) {
    const Eigen::MatrixXd power = detail::power_spectra(seg, cfg);
    const Eigen::MatrixXd fb = mel_filterbank(cfg.mel_filters, cfg.fft_size, seg.sample_rate_hz);
    const Eigen::MatrixXd dct = dct2(kNumMfcc, cfg.mel_filters);

    // Frame by frame, so each row's rounding does not depend on its position in the block.
    LldMatrix out;
    out.frames.resize(power.rows(), kNumMfcc);
    for (Eigen::Index t = 0; t < power.rows(); ++t) {
        const Eigen::RowVectorXd logmel = (power.row(t) * fb.transpose()).array().max(kLogFloor).log().matrix();
        out.frames.row(t).noalias() = logmel * dct.transpose();
    }
    out.frame_hop_s = cfg.hop_s;
    for (int i = 0; i < kNumMfcc; ++i) out.descriptor_names.push_back("mfcc_" + std::to_string(i));
    return out;
}

} // namespace affect::dsp
