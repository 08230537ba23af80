#pragma once

#include <filesystem>
#include <vector>

namespace affect::corpus {

struct AudioSegment {
    std::vector<double> samples;  // in [-1, 1)
    int sample_rate_hz = 0;

    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

/// Reads RIFF/WAVE PCM16 mono. Samples are scaled by 1/32768.
/// Rejects non-PCM encodings, multi-channel audio, other bit depths and
/// truncated headers with a DataError stating the reason.
AudioSegment read_audio(const std::filesystem::path& path);

/// Writes PCM16 mono; samples are clipped to [-1, 32767/32768] and rounded.
void write_audio(const std::filesystem::path& path, const AudioSegment& segment);

} // namespace affect::corpus
