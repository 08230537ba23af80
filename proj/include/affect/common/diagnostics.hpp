#pragma once

#include <string>
#include <vector>

namespace affect {

/// Collects non-fatal warnings. Loaders accept an optional sink; when none is
/// given, warnings go to stderr.
class Diagnostics {
public:
    explicit Diagnostics(bool echo = false) : echo_(echo) {}

    void warn(std::string message);
    const std::vector<std::string>& warnings() const { return warnings_; }
    bool contains(std::string_view fragment) const;

private:
    bool echo_;
    std::vector<std::string> warnings_;
};

/// Forwards to `sink` if present, else prints "warning: ..." to stderr.
void warn(Diagnostics* sink, std::string message);

} // namespace affect
