#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace affect {

/// Versioned binary model container ("AFP1").
///
/// Layout (all integers and reals little-endian):
///   magic "AFP1" | u32 version | str kind
///   u32 n_attributes | (str key, str value)*
///   u32 n_sections   | (str name, u64 rows, u64 cols, u64 offset)*
///   payload: per section rows*cols f64 values, row-major, at `offset`
///            bytes from the start of the payload
/// where `str` is a u32 byte length followed by the bytes.
class Container {
public:
    static constexpr std::uint32_t kVersion = 1;

    Container() = default;
    explicit Container(std::string kind) : kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

    void set_attribute(const std::string& key, std::string value) { attributes_[key] = std::move(value); }
    const std::string& attribute(const std::string& key) const;
    bool has_attribute(const std::string& key) const { return attributes_.count(key) != 0; }

    void add(const std::string& name, const Eigen::MatrixXd& m);
    void add(const std::string& name, const Eigen::VectorXd& v);
    void add_scalar(const std::string& name, double value);

    bool has(const std::string& name) const { return sections_.count(name) != 0; }
    std::vector<std::string> section_names() const;
    Eigen::MatrixXd matrix(const std::string& name) const;
    Eigen::VectorXd vector(const std::string& name) const;
    double scalar(const std::string& name) const;

    void save(const std::filesystem::path& path) const;
    /// Throws DataError on bad magic, unsupported version, or truncation.
    static Container load(const std::filesystem::path& path);
    /// Load and check that kind() == expected_kind.
    static Container load(const std::filesystem::path& path, const std::string& expected_kind);

private:
    std::string kind_;
    std::map<std::string, std::string> attributes_;
    std::map<std::string, Eigen::MatrixXd> sections_;
};

} // namespace affect
