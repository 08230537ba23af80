#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affect/corpus/wav.hpp"

namespace affect::dsp {

enum class WindowFn { Hamming, Hann, Rectangular };

struct FrameConfig {
    double window_s = 0.025;
    double hop_s = 0.010;
    WindowFn window_fn = WindowFn::Hamming;
    int mel_filters = 26;
    int fft_size = 512;

    int window_samples(int sample_rate_hz) const;
    int hop_samples(int sample_rate_hz) const;
    /// Throws ConfigError unless hop <= window, fft_size is a power of two
    /// and covers the window at the given rate.
    void validate(int sample_rate_hz) const;
};

/// Frame-by-descriptor matrix (T x D).
struct LldMatrix {
    Eigen::MatrixXd frames;
    std::vector<std::string> descriptor_names;
    double frame_hop_s = 0.0;

    Eigen::Index num_frames() const { return frames.rows(); }
    Eigen::Index dim() const { return frames.cols(); }
};

inline constexpr int kNumMfcc = 25;
inline constexpr int kLpOrder = 12;
inline constexpr int kNumPlpCepstra = kLpOrder + 1;
inline constexpr int kFullLldDim = 2 * (kNumMfcc + kNumPlpCepstra);  // 76

/// T = floor((len - win) / hop) + 1; throws DataError when the segment is shorter than a window.
int frame_count(std::size_t num_samples, int window, int hop);

/// MFCC 0..24: DCT-II (orthonormal) of floored log mel-filterbank energies.
LldMatrix extract_mfcc(const corpus::AudioSegment& seg, const FrameConfig& cfg);

/// 13 RASTA-PLP cepstra (c0..c12) from a 12th-order LP model.
LldMatrix extract_rasta_plp(const corpus::AudioSegment& seg, const FrameConfig& cfg);

/// [x | delta(x)], regression deltas over +-2 frames with edge replication.
LldMatrix append_deltas(const LldMatrix& lld);

/// Row-wise concatenation in chunk order; throws DataError on mismatched descriptors.
LldMatrix pool_story(std::span<const LldMatrix> chunks);

/// Full 76-dim stack for one segment: MFCC(25) | PLP(13) followed by their deltas.
LldMatrix extract_lld(const corpus::AudioSegment& seg, const FrameConfig& cfg);

/// Extracts every chunk and pools them into one story matrix.
LldMatrix extract_story_lld(std::span<const std::filesystem::path> chunks, const FrameConfig& cfg);

/// Binary LLD cache: magic "LLD1", u32 version, u64 T, u64 D, f64 hop,
/// T*D row-major f64 values, then D names (u32 length + bytes).
void save_lld_cache(const std::filesystem::path& path, const LldMatrix& lld);
LldMatrix load_lld_cache(const std::filesystem::path& path);

namespace detail {
std::vector<double> make_window(WindowFn fn, int length);
/// |FFT|^2 of each windowed frame, bins 0..fft/2 (T x (fft/2+1)).
Eigen::MatrixXd power_spectra(const corpus::AudioSegment& seg, const FrameConfig& cfg);
/// Levinson-Durbin on autocorrelation r[0..order]. Returns a (a[0] = 1) and the
/// final prediction error through `error`.
std::vector<double> levinson_durbin(std::span<const double> r, int order, double& error);
/// LP polynomial (a[0] = 1) and gain -> cepstra c0..c_order, c0 = log(error).
std::vector<double> lpc_to_cepstrum(std::span<const double> a, double error, int num_ceps);
} // namespace detail

} // namespace affect::dsp
