#include "affect/common/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "affect/common/errors.hpp"

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace affect {
namespace {

constexpr char kMagic[4] = {'A', 'F', 'P', '1'};

template <typename T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

void put_string(std::string& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

class Reader {
public:
    Reader(const std::string& bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::string get_string() {
        const auto n = get<std::uint32_t>();
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t position() const { return pos_; }
    std::size_t size() const { return bytes_.size(); }

    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw DataError(source_ + ": truncated model container");
    }

private:
    const std::string& bytes_;
    std::string source_;
    std::size_t pos_ = 0;
};

} // namespace

const std::string& Container::attribute(const std::string& key) const {
    auto it = attributes_.find(key);
    if (it == attributes_.end()) throw DataError("model container lacks attribute '" + key + "'");
    return it->second;
}

void Container::add(const std::string& name, const Eigen::MatrixXd& m) { sections_[name] = m; }

void Container::add(const std::string& name, const Eigen::VectorXd& v) { sections_[name] = v; }

void Container::add_scalar(const std::string& name, double value) {
    sections_[name] = Eigen::MatrixXd::Constant(1, 1, value);
}

std::vector<std::string> Container::section_names() const {
    std::vector<std::string> names;
    for (const auto& [name, m] : sections_) names.push_back(name);
    return names;
}

Eigen::MatrixXd Container::matrix(const std::string& name) const {
    auto it = sections_.find(name);
    if (it == sections_.end()) throw DataError("model container lacks section '" + name + "'");
    return it->second;
}

Eigen::VectorXd Container::vector(const std::string& name) const {
    const Eigen::MatrixXd m = matrix(name);
    if (m.cols() != 1) throw DataError("section '" + name + "' is not a column vector");
    return m.col(0);
}

double Container::scalar(const std::string& name) const {
    const Eigen::MatrixXd m = matrix(name);
    if (m.size() != 1) throw DataError("section '" + name + "' is not a scalar");
    return m(0, 0);
}

void Container::save(const std::filesystem::path& path) const {
    std::string out(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put_string(out, kind_);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(attributes_.size()));
    for (const auto& [k, v] : attributes_) {
        put_string(out, k);
        put_string(out, v);
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(sections_.size()));
    std::uint64_t offset = 0;
    for (const auto& [name, m] : sections_) {
        put_string(out, name);
        put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
        put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
        put<std::uint64_t>(out, offset);
        offset += static_cast<std::uint64_t>(m.size()) * sizeof(double);
    }
    for (const auto& [name, m] : sections_)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

Container Container::load(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string bytes = ss.str();

    Reader in(bytes, path.string());
    in.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DataError(path.string() + ": bad magic (expected AFP1)");
    for (int i = 0; i < 4; ++i) in.get<char>();
    const auto version = in.get<std::uint32_t>();
    if (version != kVersion)
        throw DataError(path.string() + ": unsupported container version " + std::to_string(version));

    Container c(in.get_string());
    const auto n_attr = in.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_attr; ++i) {
        std::string k = in.get_string();
        c.attributes_[k] = in.get_string();
    }
    struct Entry {
        std::string name;
        std::uint64_t rows, cols, offset;
    };
    std::vector<Entry> table;
    const auto n_sec = in.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_sec; ++i) {
        Entry e;
        e.name = in.get_string();
        e.rows = in.get<std::uint64_t>();
        e.cols = in.get<std::uint64_t>();
        e.offset = in.get<std::uint64_t>();
        table.push_back(std::move(e));
    }
    const std::size_t payload = in.position();
    for (const auto& e : table) {
        const std::size_t begin = payload + e.offset;
        const std::size_t count = e.rows * e.cols;
        if (begin + count * sizeof(double) > bytes.size())
            throw DataError(path.string() + ": truncated section '" + e.name + "'");
        Eigen::MatrixXd m(static_cast<Eigen::Index>(e.rows), static_cast<Eigen::Index>(e.cols));
        std::size_t pos = begin;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index col = 0; col < m.cols(); ++col) {
                std::memcpy(&m(r, col), bytes.data() + pos, sizeof(double));
                pos += sizeof(double);
            }
        c.sections_[e.name] = std::move(m);
    }
    return c;
}

Container Container::load(const std::filesystem::path& path, const std::string& expected_kind) {
    Container c = load(path);
    if (c.kind() != expected_kind)
        throw DataError(path.string() + ": expected a '" + expected_kind + "' model, found '" + c.kind() + "'");
    return c;
}

} // namespace affect
