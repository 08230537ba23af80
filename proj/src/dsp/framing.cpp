#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "affect/common/errors.hpp"
#include "affect/dsp/lld.hpp"

namespace affect::dsp {

int FrameConfig::window_samples(int sample_rate_hz) const {
    return static_cast<int>(std::lround(window_s * sample_rate_hz));
}

int FrameConfig::hop_samples(int sample_rate_hz) const {
    return static_cast<int>(std::lround(hop_s * sample_rate_hz));
}

void FrameConfig::validate(int sample_rate_hz) const {
    if (sample_rate_hz <= 0) throw ConfigError("frame config: sample rate must be positive");
    const int win = window_samples(sample_rate_hz);
    const int hop = hop_samples(sample_rate_hz);
    if (win < 2 || hop < 1) throw ConfigError("frame config: window/hop too short for the sample rate");
    if (hop > win) throw ConfigError("frame config: hop must not exceed the window");
    if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) throw ConfigError("frame config: fft_size must be a power of two");
    if (fft_size < win) throw ConfigError("frame config: fft_size smaller than the window");
    if (mel_filters <= kNumMfcc) throw ConfigError("frame config: need more mel filters than cepstral coefficients");
}

int frame_count(std::size_t num_samples, int window, int hop) {
    if (num_samples < static_cast<std::size_t>(window))
        throw DataError("audio segment shorter than one analysis window (" + std::to_string(num_samples) + " < " +
                        std::to_string(window) + " samples)");
    return static_cast<int>((num_samples - static_cast<std::size_t>(window)) / static_cast<std::size_t>(hop)) + 1;
}

namespace detail {

std::vector<double> make_window(WindowFn fn, int length) {
    std::vector<double> w(static_cast<std::size_t>(length), 1.0);
    if (length < 2) return w;
    const double denom = length - 1;
    for (int n = 0; n < length; ++n) {
        const double c = std::cos(2.0 * std::numbers::pi * n / denom);
        switch (fn) {
            case WindowFn::Hamming: w[n] = 0.54 - 0.46 * c; break;
            case WindowFn::Hann: w[n] = 0.5 - 0.5 * c; break;
            case WindowFn::Rectangular: break;
        }
    }
    return w;
}

Eigen::MatrixXd power_spectra(const corpus::AudioSegment& seg, const FrameConfig& cfg) {
    cfg.validate(seg.sample_rate_hz);
    const int win = cfg.window_samples(seg.sample_rate_hz);
    const int hop = cfg.hop_samples(seg.sample_rate_hz);
    const int frames = frame_count(seg.samples.size(), win, hop);
    const int bins = cfg.fft_size / 2 + 1;
    const std::vector<double> window = make_window(cfg.window_fn, win);

    Eigen::FFT<double> fft;
    std::vector<double> buf(static_cast<std::size_t>(cfg.fft_size));
    std::vector<std::complex<double>> spec;
    Eigen::MatrixXd out(frames, bins);
    for (int t = 0; t < frames; ++t) {
        std::fill(buf.begin(), buf.end(), 0.0);
        const std::size_t start = static_cast<std::size_t>(t) * hop;
        for (int n = 0; n < win; ++n) buf[n] = seg.samples[start + n] * window[n];
        fft.fwd(spec, buf);
        for (int k = 0; k < bins; ++k) out(t, k) = std::norm(spec[k]);
    }
    return out;
}

} // namespace detail
} // namespace affect::dsp
