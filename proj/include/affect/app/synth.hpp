#pragma once

#include <cstdint>
#include <filesystem>

namespace affect::app {

struct SynthOptions {
    std::uint64_t seed = 7;
    std::size_t speakers = 87;
    std::size_t stories_per_speaker = 3;
    /// Additional speakers whose stories are written without labels.
    std::size_t test_speakers = 0;
    std::size_t chunks_per_story = 3;
    double chunk_seconds = 1.0;
    int sample_rate_hz = 16000;
};

struct SynthSummary {
    std::size_t stories = 0;
    std::size_t labeled = 0;
    std::filesystem::path manifest;
    std::filesystem::path config;
};

/// Writes a deterministic synthetic corpus under `out_dir`: PCM16 audio chunks
/// whose spectral tilt and energy follow the arousal label, German and English
/// transcripts whose sentiment words follow the valence label, miniature
/// SentiWS / SentiWordNet lexicons, English word embeddings, a polarity
/// sidecar, manifest.csv and a ready-to-run config.ini.
SynthSummary synthesize_corpus(const std::filesystem::path& out_dir, const SynthOptions& options);

} // namespace affect::app
