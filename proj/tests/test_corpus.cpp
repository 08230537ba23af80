#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>

#include "affect/common/csv.hpp"
#include "affect/common/diagnostics.hpp"
#include "affect/common/errors.hpp"
#include "affect/corpus/corpus.hpp"
#include "affect/corpus/wav.hpp"
#include "test_support.hpp"

using namespace affect;
using namespace affect::corpus;
namespace fs = std::filesystem;

namespace {

void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>(v >> 8));
}

std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint16_t bits, std::uint32_t data_len) {
    std::string s = "RIFF";
    put_u32(s, 36 + data_len);
    s += "WAVEfmt ";
    put_u32(s, 16);
    put_u16(s, format);
    put_u16(s, channels);
    put_u32(s, 16000);
    put_u32(s, 16000u * channels * bits / 8);
    put_u16(s, static_cast<std::uint16_t>(channels * bits / 8));
    put_u16(s, bits);
    s += "data";
    put_u32(s, data_len);
    s.append(data_len, '\0');
    return s;
}

/// Two speakers with two stories each, one chunk per story.
fs::path tiny_manifest(const fs::path& dir) {
    fs::create_directories(dir / "audio");
    AudioSegment seg;
    seg.sample_rate_hz = 16000;
    seg.samples.assign(1600, 0.0);
    std::string manifest = "story_id,speaker_id,chunk_paths,transcript_de_path,transcript_en_path,valence,arousal\n";
    const char* labels[][2] = {{"L", "H"}, {"M", "M"}, {"H", "L"}, {"", ""}};
    for (int i = 0; i < 4; ++i) {
        const std::string id = "st" + std::to_string(i);
        write_audio(dir / "audio" / (id + ".wav"), seg);
        write_text_file(dir / (id + ".de.txt"), "Das ist gut " + id);
        write_text_file(dir / (id + ".en.txt"), "This is good " + id);
        manifest += id + ",spk" + std::to_string(i / 2) + ",audio/" + id + ".wav," + id + ".de.txt," + id + ".en.txt," +
                    labels[i][0] + "," + labels[i][1] + "\n";
    }
    write_text_file(dir / "manifest.csv", manifest);
    return dir / "manifest.csv";
}

} // namespace

TEST_CASE("PCM16 audio round trips within quantization") {
    const auto dir = testing::scratch_dir("wav");
    AudioSegment seg;
    seg.sample_rate_hz = 16000;
    for (int i = 0; i < 400; ++i) seg.samples.push_back(0.9 * std::sin(0.05 * i));
    seg.samples.push_back(1.5);
    seg.samples.push_back(-1.5);
    write_audio(dir / "a.wav", seg);
    const AudioSegment back = read_audio(dir / "a.wav");
    REQUIRE(back.samples.size() == seg.samples.size());
    CHECK(back.sample_rate_hz == 16000);
    for (std::size_t i = 0; i < 400; ++i) CHECK(std::abs(back.samples[i] - seg.samples[i]) <= 0.5 / 32768 + 1e-15);
    CHECK(back.samples[400] == doctest::Approx(32767.0 / 32768));
    CHECK(back.samples[401] == -1.0);
}

TEST_CASE("read_audio rejects unsupported encodings") {
    const auto dir = testing::scratch_dir("wav_bad");
    write_text_file(dir / "float.wav", wav_bytes(3, 1, 32, 8));
    write_text_file(dir / "stereo.wav", wav_bytes(1, 2, 16, 8));
    write_text_file(dir / "8bit.wav", wav_bytes(1, 1, 8, 8));
    write_text_file(dir / "trunc.wav", wav_bytes(1, 1, 16, 8).substr(0, 20));
    for (const char* name : {"float.wav", "stereo.wav", "8bit.wav", "trunc.wav"})
        CHECK_THROWS_AS(read_audio(dir / name), DataError);
    write_text_file(dir / "ok.wav", wav_bytes(1, 1, 16, 8));
    CHECK(read_audio(dir / "ok.wav").samples.size() == 4);
}

TEST_CASE("manifest loads records and class statistics") {
    const auto dir = testing::scratch_dir("manifest");
    const Corpus c = load_manifest(tiny_manifest(dir));
    REQUIRE(c.size() == 4);
    CHECK(c[0].speaker_id == "spk0");
    CHECK(c[0].transcript_en == "This is good st0");
    CHECK(c[0].valence == Label::Low);
    CHECK(c[0].arousal == Label::High);
    CHECK_FALSE(c[3].labeled());
    CHECK(c.class_counts(Task::Valence) == ClassCounts{1, 1, 1});
    CHECK(c.labeled_indices(Task::Arousal) == std::vector<std::size_t>{0, 1, 2});
    CHECK(c.find("st2") == std::optional<std::size_t>(2));
    CHECK_FALSE(c.find("nope").has_value());
    const Corpus sub = c.subset({0, 1});
    CHECK(sub.class_counts(Task::Valence) == ClassCounts{1, 1, 0});
    CHECK(sub.minority_set(Task::Valence).to_string() == "H");
}

TEST_CASE("manifest write and load round trip") {
    const auto dir = testing::scratch_dir("manifest_rt");
    const Corpus c = load_manifest(tiny_manifest(dir));
    write_manifest(dir / "copy.csv", c);
    const Corpus back = load_manifest(dir / "copy.csv");
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(back[i] == c[i]);
}

TEST_CASE("manifest errors name the row and field") {
    const auto dir = testing::scratch_dir("manifest_err");
    const fs::path m = tiny_manifest(dir);
    const std::string good = read_text_file(m);
    auto expect_error = [&](const std::string& content, const std::string& fragment) {
        write_text_file(dir / "bad.csv", content);
        try {
            load_manifest(dir / "bad.csv");
            FAIL("expected a DataError");
        } catch (const DataError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
        }
    };
    const std::string header = good.substr(0, good.find('\n') + 1);
    expect_error(good + "st0,spk9,audio/st0.wav,,,L,L\n", "duplicate story_id");
    expect_error(header + "x,spk0,audio/st0.wav,,,Q,L\n", "valence");
    expect_error(header + "x,spk0,audio/missing.wav,,,L,L\n", "chunk_paths");
    expect_error(header + "x,spk0,audio/st0.wav,,,L,\n", "arousal");
    expect_error(header + "x,spk0,audio/st0.wav,,,L,Q\n", "bad.csv:2");
    CHECK_THROWS_AS(load_manifest(dir / "absent.csv"), DataError);
}

TEST_CASE("sidecar attaches features with warnings for odd rows") {
    const auto dir = testing::scratch_dir("sidecar");
    const Corpus c = load_manifest(tiny_manifest(dir));
    write_text_file(dir / "side.csv", "story_id,pol,subj\nst0,0.5,0.1\nghost,1,1\nst0,0.25,0.2\nst2,-1,0\n");
    Diagnostics diag;
    const Corpus s = load_sidecar(dir / "side.csv", c, &diag);
    CHECK(s.sidecar_names() == std::vector<std::string>{"pol", "subj"});
    CHECK(s[0].sidecar == std::vector<double>{0.25, 0.2});
    CHECK(s[1].sidecar.empty());
    CHECK(s[2].sidecar == std::vector<double>{-1, 0});
    CHECK(diag.contains("ghost"));
    CHECK(diag.contains("duplicate"));

    write_text_file(dir / "empty.csv", "");
    Diagnostics d2;
    CHECK(load_sidecar(dir / "empty.csv", c, &d2).sidecar_names().empty());
    CHECK(d2.contains("empty"));

    write_text_file(dir / "nan.csv", "story_id,pol\nst0,abc\n");
    CHECK_THROWS_AS(load_sidecar(dir / "nan.csv", c), DataError);
}
