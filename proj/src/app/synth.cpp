#include "affect/app/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"
#include "affect/corpus/corpus.hpp"
#include "affect/corpus/wav.hpp"

namespace affect::app {

namespace fs = std::filesystem;

namespace {

struct GermanWord {
    const char* lemma;
    const char* pos;
    double score;
    std::vector<const char*> inflections;
};

// Sentiment-bearing adjectives; the POS tagger maps their suffixes to 'a'.
const std::vector<const char*> kEnglishPositive{
    "joyful",   "wonderful", "cheerful", "delightful", "glorious", "marvelous", "generous", "graceful",
    "hopeful",  "peaceful",  "grateful", "adorable",   "creative", "playful",   "thankful", "lovable"};
const std::vector<const char*> kEnglishNegative{
    "hopeless", "painful",  "dreadful", "miserable", "fearful",  "anxious", "nervous",  "useless",
    "worthless", "hateful", "harmful",  "careless",  "shameful", "sorrowful", "dangerous", "helpless"};
const std::vector<const char*> kEnglishNeutral{
    "garden", "morning", "house",   "river",  "table",  "kitchen", "window", "street",  "village",
    "letter", "train",   "church",  "market", "school", "brother", "sister", "friend",  "doctor",
    "evening", "winter", "summer",  "walked", "visited", "talked", "cooked", "remember", "the",
    "and",    "was",     "we",      "it",     "in",     "of",      "a",      "my",      "there"};

const std::vector<GermanWord> kGermanPositive{
    {"froh", "ADJX", 0.45, {"frohe", "froher", "frohes", "frohen"}},
    {"glücklich", "ADJX", 0.62, {"glückliche", "glücklicher", "glückliches", "glücklichen"}},
    {"schön", "ADJX", 0.39, {"schöne", "schöner", "schönes", "schönen"}},
    {"herrlich", "ADJX", 0.58, {"herrliche", "herrlicher", "herrliches", "herrlichen"}},
    {"wunderbar", "ADJX", 0.71, {"wunderbare", "wunderbarer", "wunderbares", "wunderbaren"}},
    {"fröhlich", "ADJX", 0.50, {"fröhliche", "fröhlicher", "fröhliches", "fröhlichen"}},
    {"dankbar", "ADJX", 0.33, {"dankbare", "dankbarer", "dankbares", "dankbaren"}},
    {"zufrieden", "ADJX", 0.27, {"zufriedene", "zufriedener", "zufriedenes", "zufriedenen"}}};
const std::vector<GermanWord> kGermanNegative{
    {"traurig", "ADJX", -0.51, {"traurige", "trauriger", "trauriges", "traurigen"}},
    {"schlimm", "ADJX", -0.44, {"schlimme", "schlimmer", "schlimmes", "schlimmen"}},
    {"schrecklich", "ADJX", -0.67, {"schreckliche", "schrecklicher", "schreckliches", "schrecklichen"}},
    {"einsam", "ADJX", -0.38, {"einsame", "einsamer", "einsames", "einsamen"}},
    {"ängstlich", "ADJX", -0.42, {"ängstliche", "ängstlicher", "ängstliches", "ängstlichen"}},
    {"elend", "ADJX", -0.59, {"elende", "elender", "elendes", "elenden"}},
    {"furchtbar", "ADJX", -0.73, {"furchtbare", "furchtbarer", "furchtbares", "furchtbaren"}},
    {"bitter", "ADJX", -0.30, {"bittere", "bitterer", "bitteres", "bitteren"}}};
const std::vector<const char*> kGermanNeutral{
    "Garten", "Morgen", "Haus",   "Fluss",  "Tisch",  "Küche",  "Fenster", "Straße",    "Dorf",
    "Brief",  "Zug",    "Kirche", "Markt",  "Schule", "Bruder", "Schwester", "Arzt",    "Abend",
    "Winter", "Sommer", "gingen", "besuchten", "sprachen", "kochten", "der", "die", "das", "und",
    "wir",    "im",     "war",    "es",     "mein"};

Label draw_label(std::mt19937_64& rng) {
    std::discrete_distribution<int> d({0.25, 0.45, 0.30});
    return label_at(static_cast<std::size_t>(d(rng)));
}

struct SentimentCounts {
    int positive = 0;
    int negative = 0;
};

SentimentCounts draw_counts(Label valence, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> strong(3, 5), weak(0, 1);
    std::bernoulli_distribution stray(0.2);
    switch (valence) {
    case Label::High: return {strong(rng), stray(rng) ? 1 : 0};
    case Label::Low: return {stray(rng) ? 1 : 0, strong(rng)};
    case Label::Medium: return {weak(rng), weak(rng)};
    }
    return {};
}

template <typename T>
const T& pick(const std::vector<T>& pool, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
}

std::string compose(std::vector<std::string> words, std::mt19937_64& rng) {
    std::shuffle(words.begin(), words.end(), rng);
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += (i % 7 == 0) ? ", " : " ";
        out += words[i];
    }
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out + ".\n";
}

std::string english_text(const SentimentCounts& c, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> filler(10, 16);
    std::vector<std::string> words;
    for (int i = 0, n = filler(rng); i < n; ++i) words.emplace_back(pick(kEnglishNeutral, rng));
    for (int i = 0; i < c.positive; ++i) words.emplace_back(pick(kEnglishPositive, rng));
    for (int i = 0; i < c.negative; ++i) words.emplace_back(pick(kEnglishNegative, rng));
    return compose(std::move(words), rng);
}

std::string german_word(const GermanWord& w, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(0, w.inflections.size());
    const std::size_t i = d(rng);
    return i == w.inflections.size() ? w.lemma : w.inflections[i];
}

std::string german_text(const SentimentCounts& c, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> filler(10, 16);
    std::vector<std::string> words;
    for (int i = 0, n = filler(rng); i < n; ++i) words.emplace_back(pick(kGermanNeutral, rng));
    for (int i = 0; i < c.positive; ++i) words.push_back(german_word(pick(kGermanPositive, rng), rng));
    for (int i = 0; i < c.negative; ++i) words.push_back(german_word(pick(kGermanNegative, rng), rng));
    return compose(std::move(words), rng);
}

struct Speaker {
    double f0 = 150.0;
    double gain = 1.0;
};

/// Noise through a one-pole tilt filter (pole set by arousal) plus a voiced
/// speaker harmonic; the level also follows arousal.
corpus::AudioSegment synth_chunk(Label arousal, const Speaker& spk, const SynthOptions& opt, std::mt19937_64& rng) {
    static constexpr std::array<double, 3> kPole{0.85, 0.4, -0.3};
    static constexpr std::array<double, 3> kLevel{0.04, 0.08, 0.16};
    std::uniform_real_distribution<double> jitter(-0.08, 0.08);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double a = kPole[index_of(arousal)] + jitter(rng);
    const double level = kLevel[index_of(arousal)] * spk.gain;
    const double norm = std::sqrt(1.0 - a * a);

    corpus::AudioSegment seg;
    seg.sample_rate_hz = opt.sample_rate_hz;
    const auto n = static_cast<std::size_t>(std::lround(opt.chunk_seconds * opt.sample_rate_hz));
    seg.samples.resize(n);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double ph = phase(rng);
    double y = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        y = noise(rng) + a * y;
        const double time = static_cast<double>(t) / opt.sample_rate_hz;
        const double voiced = std::sin(2.0 * std::numbers::pi * spk.f0 * time + ph) +
                              0.5 * std::sin(4.0 * std::numbers::pi * spk.f0 * time + ph);
        const double v = level * (norm * y + 0.5 * voiced);
        seg.samples[t] = std::clamp(v, -1.0, 32767.0 / 32768.0);
    }
    return seg;
}

std::string sentiws_file() {
    std::string out;
    auto add = [&](const GermanWord& w) {
        std::string name = w.lemma;
        out += name + "|" + w.pos + "\t" + format_real(w.score) + "\t";
        for (std::size_t i = 0; i < w.inflections.size(); ++i) out += std::string(i ? "," : "") + w.inflections[i];
        out += "\n";
    };
    for (const auto& w : kGermanPositive) add(w);
    for (const auto& w : kGermanNegative) add(w);
    return out;
}

std::string sentiwordnet_file(std::mt19937_64& rng) {
    std::string out = "# POS\tID\tPosScore\tNegScore\tSynsetTerms\tGloss\n";
    std::uniform_int_distribution<int> strong(4, 7), weak(0, 1);
    int id = 1000;
    auto line = [&](char pos, double p, double n, const std::string& term, int sense) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%08d", id++);
        out += std::string(1, pos) + "\t" + buf + "\t" + format_real(p) + "\t" + format_real(n) + "\t" + term + "#" +
               std::to_string(sense) + "\tsynthetic gloss\n";
    };
    for (const char* w : kEnglishPositive) line('a', strong(rng) / 8.0, weak(rng) / 8.0, w, 1);
    for (const char* w : kEnglishNegative) line('a', weak(rng) / 8.0, strong(rng) / 8.0, w, 1);
    line('n', 0.25, 0.0, "friend", 1);
    line('n', 0.125, 0.0, "friend", 2);
    line('n', 0.0, 0.0, "garden", 1);
    line('n', 0.0, 0.125, "doctor", 1);
    line('n', 0.0, 0.0, "house", 1);
    return out;
}

std::string embeddings_file(std::mt19937_64& rng) {
    constexpr int kDim = 100;
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> direction(kDim);
    double norm = 0.0;
    for (double& d : direction) {
        d = noise(rng);
        norm += d * d;
    }
    for (double& d : direction) d /= std::sqrt(norm);

    std::vector<std::pair<std::string, double>> vocab;
    for (const char* w : kEnglishPositive) vocab.emplace_back(w, 1.0);
    for (const char* w : kEnglishNegative) vocab.emplace_back(w, -1.0);
    for (const char* w : kEnglishNeutral) vocab.emplace_back(w, 0.0);
    std::string out = std::to_string(vocab.size()) + " " + std::to_string(kDim) + "\n";
    for (const auto& [word, polarity] : vocab) {
        out += word;
        for (int d = 0; d < kDim; ++d) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.6f", 0.3 * noise(rng) + 2.0 * polarity * direction[d]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::string config_file(std::uint64_t seed) {
    return "; Synthetic corpus pipeline configuration\n"
           "[run]\n"
           "task = valence\n"
           "seed = " + std::to_string(seed) + "\n"
           "output_dir = out\n"
           "\n[corpus]\n"
           "manifest = manifest.csv\n"
           "sidecar = sidecar.csv\n"
           "cache_dir = cache\n"
           "\n[acoustic]\n"
           "enabled = true\n"
           "k_gmm = 8\n"
           "pca_variance = 0.999\n"
           "power_norm = true\n"
           "l2_norm = true\n"
           "gmm_max_frames = 12000\n"
           "classifier = kelm\n"
           "kernel = linear\n"
           "c_reg = 1\n"
           "\n[linguistic]\n"
           "enabled = true\n"
           "blocks = sentiws, sentiwordnet\n"
           "sentiws = lexicon/sentiws.txt\n"
           "sentiwordnet = lexicon/sentiwordnet.txt\n"
           "embeddings = lexicon/embeddings_en.vec\n"
           "subset = none\n"
           "classifier = ridge-ovr\n"
           "c_reg = 1\n"
           "\n[classifier]\n"
           "kind = kelm\n"
           "kernel = linear\n"
           "c_reg = 1\n"
           "\n[fusion]\n"
           "mode = weighted\n"
           "weights = search\n"
           "step = 0.1\n"
           "\n[cv]\n"
           "folds = 4\n"
           "inner_folds = 3\n";
}

} // namespace

SynthSummary synthesize_corpus(const fs::path& out_dir, const SynthOptions& options) {
    if (options.speakers == 0 || options.stories_per_speaker == 0 || options.chunks_per_story == 0)
        throw ConfigError("synth: speakers, stories and chunks must be positive");
    if (!(options.chunk_seconds >= 0.05)) throw ConfigError("synth: chunks must be at least 50 ms long");
    fs::create_directories(out_dir / "audio");
    fs::create_directories(out_dir / "text");
    fs::create_directories(out_dir / "lexicon");

    std::mt19937_64 rng(options.seed);
    std::vector<corpus::StoryRecord> stories;
    std::string sidecar = "story_id,vader_compound,vader_pos,vader_neg,textblob_polarity,textblob_subjectivity,"
                          "flair_positive,flair_negative\n";
    std::normal_distribution<double> noise(0.0, 0.15);
    std::uniform_real_distribution<double> f0(90.0, 240.0);
    std::normal_distribution<double> gain(0.0, 0.12);

    const std::size_t total_speakers = options.speakers + options.test_speakers;
    for (std::size_t s = 0; s < total_speakers; ++s) {
        char spk_id[32];
        std::snprintf(spk_id, sizeof spk_id, "spk%03zu", s + 1);
        const Speaker speaker{f0(rng), std::exp(gain(rng))};
        const bool labeled = s < options.speakers;
        for (std::size_t k = 0; k < options.stories_per_speaker; ++k) {
            const std::string id = std::string(spk_id) + "_s" + std::to_string(k + 1);
            const Label valence = draw_label(rng);
            const Label arousal = draw_label(rng);
            corpus::StoryRecord rec;
            rec.story_id = id;
            rec.speaker_id = spk_id;
            for (std::size_t c = 0; c < options.chunks_per_story; ++c) {
                const fs::path p = out_dir / "audio" / (id + "_c" + std::to_string(c + 1) + ".wav");
                corpus::write_audio(p, synth_chunk(arousal, speaker, options, rng));
                rec.audio_chunks.push_back(p);
            }
            const SentimentCounts counts = draw_counts(valence, rng);
            rec.transcript_en = english_text(counts, rng);
            rec.transcript_de = german_text(counts, rng);
            rec.transcript_en_path = out_dir / "text" / (id + ".en.txt");
            rec.transcript_de_path = out_dir / "text" / (id + ".de.txt");
            write_text_file(rec.transcript_en_path, rec.transcript_en);
            write_text_file(rec.transcript_de_path, rec.transcript_de);
            if (labeled) {
                rec.valence = valence;
                rec.arousal = arousal;
            }
            stories.push_back(std::move(rec));

            const double polarity = (counts.positive - counts.negative) / 5.0;
            const std::array<double, 7> side{
                std::tanh(polarity + noise(rng)), counts.positive / 5.0 + noise(rng), counts.negative / 5.0 + noise(rng),
                polarity + noise(rng),            0.5 + 0.1 * (counts.positive + counts.negative) + noise(rng),
                0.5 + polarity / 2 + noise(rng),  0.5 - polarity / 2 + noise(rng)};
            sidecar += id;
            for (double v : side) sidecar += "," + format_real(std::round(v * 1e6) / 1e6);
            sidecar += "\n";
        }
    }

    SynthSummary summary;
    summary.stories = stories.size();
    summary.labeled = options.speakers * options.stories_per_speaker;
    summary.manifest = out_dir / "manifest.csv";
    summary.config = out_dir / "config.ini";
    corpus::write_manifest(summary.manifest, corpus::Corpus(std::move(stories)));
    write_text_file(out_dir / "sidecar.csv", sidecar);
    write_text_file(out_dir / "lexicon" / "sentiws.txt", sentiws_file());
    write_text_file(out_dir / "lexicon" / "sentiwordnet.txt", sentiwordnet_file(rng));
    write_text_file(out_dir / "lexicon" / "embeddings_en.vec", embeddings_file(rng));
    write_text_file(summary.config, config_file(options.seed));
    return summary;
}

} // namespace affect::app
