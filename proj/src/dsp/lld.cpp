#include "affect/dsp/lld.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "affect/common/errors.hpp"

namespace affect::dsp {

LldMatrix append_deltas(const LldMatrix& lld) {
    const Eigen::Index T = lld.num_frames();
    const Eigen::Index D = lld.dim();
    if (T < 1) throw DataError("append_deltas: empty LLD matrix");
    constexpr int kWidth = 2;
    constexpr double kNorm = 2.0 * (1 * 1 + 2 * 2);

    LldMatrix out;
    out.frame_hop_s = lld.frame_hop_s;
    out.frames.resize(T, 2 * D);
    out.frames.leftCols(D) = lld.frames;
    auto at = [&](Eigen::Index t) { return std::clamp<Eigen::Index>(t, 0, T - 1); };
    for (Eigen::Index t = 0; t < T; ++t) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(D);
        for (int n = 1; n <= kWidth; ++n) acc += n * (lld.frames.row(at(t + n)) - lld.frames.row(at(t - n)));
        out.frames.row(t).tail(D) = acc / kNorm;
    }
    out.descriptor_names = lld.descriptor_names;
    for (const auto& name : lld.descriptor_names) out.descriptor_names.push_back("d_" + name);
    return out;
}

LldMatrix pool_story(std::span<const LldMatrix> chunks) {
    if (chunks.empty()) throw DataError("pool_story: no chunks");
    const auto& first = chunks.front();
    Eigen::Index total = 0;
    for (const auto& c : chunks) {
        if (c.dim() != first.dim() || c.descriptor_names != first.descriptor_names)
            throw DataError("pool_story: chunks have mismatched descriptors (" + std::to_string(c.dim()) + " vs " +
                            std::to_string(first.dim()) + " columns)");
        total += c.num_frames();
    }
    LldMatrix out;
    out.descriptor_names = first.descriptor_names;
    out.frame_hop_s = first.frame_hop_s;
    out.frames.resize(total, first.dim());
    Eigen::Index row = 0;
    for (const auto& c : chunks) {
        out.frames.middleRows(row, c.num_frames()) = c.frames;
        row += c.num_frames();
    }
    return out;
}

LldMatrix extract_lld(const corpus::AudioSegment& seg, const FrameConfig& cfg) {
    const LldMatrix mfcc = extract_mfcc(seg, cfg);
    const LldMatrix plp = extract_rasta_plp(seg, cfg);
    LldMatrix base;
    base.frame_hop_s = cfg.hop_s;
    base.frames.resize(mfcc.num_frames(), mfcc.dim() + plp.dim());
    base.frames << mfcc.frames, plp.frames;
    base.descriptor_names = mfcc.descriptor_names;
    base.descriptor_names.insert(base.descriptor_names.end(), plp.descriptor_names.begin(), plp.descriptor_names.end());
    return append_deltas(base);
}

LldMatrix extract_story_lld(std::span<const std::filesystem::path> chunks, const FrameConfig& cfg) {
    std::vector<LldMatrix> parts;
    parts.reserve(chunks.size());
    for (const auto& path : chunks) {
        try {
            parts.push_back(extract_lld(corpus::read_audio(path), cfg));
        } catch (const DataError& e) {
            throw DataError(path.string() + ": " + e.what());
        }
    }
    return pool_story(parts);
}

namespace {
constexpr char kCacheMagic[4] = {'L', 'L', 'D', '1'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& where) {
    T v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError(where + ": truncated LLD cache");
    return v;
}
} // namespace

void save_lld_cache(const std::filesystem::path& path, const LldMatrix& lld) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(kCacheMagic, 4);
    put<std::uint32_t>(out, kCacheVersion);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(lld.num_frames()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(lld.dim()));
    put<double>(out, lld.frame_hop_s);
    for (Eigen::Index t = 0; t < lld.num_frames(); ++t)
        for (Eigen::Index d = 0; d < lld.dim(); ++d) put<double>(out, lld.frames(t, d));
    for (const auto& name : lld.descriptor_names) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
}

LldMatrix load_lld_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    const std::string where = path.string();
    if (!in) throw DataError("cannot open " + where);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kCacheMagic, 4) != 0) throw DataError(where + ": not an LLD cache");
    if (get<std::uint32_t>(in, where) != kCacheVersion) throw DataError(where + ": unsupported LLD cache version");
    const auto T = get<std::uint64_t>(in, where);
    const auto D = get<std::uint64_t>(in, where);
    LldMatrix lld;
    lld.frame_hop_s = get<double>(in, where);
    lld.frames.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(D));
    for (Eigen::Index t = 0; t < lld.frames.rows(); ++t)
        for (Eigen::Index d = 0; d < lld.frames.cols(); ++d) lld.frames(t, d) = get<double>(in, where);
    for (std::uint64_t d = 0; d < D; ++d) {
        const auto n = get<std::uint32_t>(in, where);
        std::string name(n, '\0');
        if (!in.read(name.data(), n)) throw DataError(where + ": truncated LLD cache");
        lld.descriptor_names.push_back(std::move(name));
    }
    return lld;
}

} // namespace affect::dsp
