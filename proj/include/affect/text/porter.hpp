#pragma once

#include <string>
#include <string_view>

namespace affect::text {

/// Porter (1980) stemmer, following the reference ANSI C implementation.
/// Input is expected lowercase ASCII; words of one or two letters are returned
/// unchanged.
std::string porter_stem(std::string_view word);

} // namespace affect::text
