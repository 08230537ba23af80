#include "affect/corpus/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "affect/common/errors.hpp"

namespace affect::corpus {
namespace {

std::uint32_t u32_at(const std::string& b, std::size_t pos) {
    std::uint32_t v;
    std::memcpy(&v, b.data() + pos, 4);
    return v;
}

std::uint16_t u16_at(const std::string& b, std::size_t pos) {
    std::uint16_t v;
    std::memcpy(&v, b.data() + pos, 2);
    return v;
}

void put_u32(std::string& out, std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); }
void put_u16(std::string& out, std::uint16_t v) { out.append(reinterpret_cast<const char*>(&v), 2); }

} // namespace

AudioSegment read_audio(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open audio file " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string bytes = ss.str();
    const std::string where = path.string() + ": ";

    if (bytes.size() < 12) throw DataError(where + "truncated header");
    if (bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
        throw DataError(where + "not a RIFF/WAVE file");

    bool have_fmt = false;
    int rate = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::string id = bytes.substr(pos, 4);
        const std::uint32_t size = u32_at(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (id == "fmt ") {
            if (size < 16 || body + 16 > bytes.size()) throw DataError(where + "truncated header (fmt chunk)");
            std::uint16_t format = u16_at(bytes, body);
            const std::uint16_t channels = u16_at(bytes, body + 2);
            rate = static_cast<int>(u32_at(bytes, body + 4));
            const std::uint16_t bits = u16_at(bytes, body + 14);
            if (format == 0xFFFE && size >= 40 && body + 26 <= bytes.size())
                format = u16_at(bytes, body + 24);  // WAVE_FORMAT_EXTENSIBLE sub-format
            if (format != 1) throw DataError(where + "non-PCM encoding (format tag " + std::to_string(format) + ")");
            if (channels != 1)
                throw DataError(where + "multi-channel audio (" + std::to_string(channels) + " channels)");
            if (bits != 16) throw DataError(where + "unsupported bit depth " + std::to_string(bits));
            if (rate <= 0) throw DataError(where + "invalid sample rate");
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw DataError(where + "data chunk precedes fmt chunk");
            if (body + size > bytes.size()) throw DataError(where + "truncated data chunk");
            if (size % 2 != 0) throw DataError(where + "odd PCM16 data size");
            AudioSegment seg;
            seg.sample_rate_hz = rate;
            seg.samples.resize(size / 2);
            for (std::size_t i = 0; i < seg.samples.size(); ++i) {
                std::int16_t s;
                std::memcpy(&s, bytes.data() + body + 2 * i, 2);
                seg.samples[i] = static_cast<double>(s) / 32768.0;
            }
            if (seg.samples.empty()) throw DataError(where + "empty data chunk");
            return seg;
        }
        pos = body + size + (size & 1u);
    }
    throw DataError(where + (have_fmt ? "missing data chunk" : "truncated header (no fmt chunk)"));
}

void write_audio(const std::filesystem::path& path, const AudioSegment& segment) {
    if (segment.sample_rate_hz <= 0) throw DataError("write_audio: sample rate must be positive");
    const auto n = static_cast<std::uint32_t>(segment.samples.size());
    std::string out;
    out.reserve(44 + 2 * n);
    out += "RIFF";
    put_u32(out, 36 + 2 * n);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, 1);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(segment.sample_rate_hz));
    put_u32(out, static_cast<std::uint32_t>(segment.sample_rate_hz) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    out += "data";
    put_u32(out, 2 * n);
    for (double x : segment.samples) {
        const double scaled = std::round(std::clamp(x, -1.0, 32767.0 / 32768.0) * 32768.0);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

} // namespace affect::corpus
