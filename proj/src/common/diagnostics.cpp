#include "affect/common/diagnostics.hpp"

#include <iostream>

namespace affect {

void Diagnostics::warn(std::string message) {
    if (echo_) std::cerr << "warning: " << message << '\n';
    warnings_.push_back(std::move(message));
}

bool Diagnostics::contains(std::string_view fragment) const {
    for (const auto& w : warnings_)
        if (w.find(fragment) != std::string::npos) return true;
    return false;
}

void warn(Diagnostics* sink, std::string message) {
    if (sink)
        sink->warn(std::move(message));
    else
        std::cerr << "warning: " << message << '\n';
}

} // namespace affect
