#pragma once

#include <filesystem>

#include "affect/fv/gmm.hpp"
#include "affect/fv/pca.hpp"

namespace affect::fv {

// Stored in the AFP1 container under kinds "pca" and "gmm".
void save_pca(const std::filesystem::path& path, const PcaModel& model);
PcaModel load_pca(const std::filesystem::path& path);
void save_gmm(const std::filesystem::path& path, const GmmModel& model);
GmmModel load_gmm(const std::filesystem::path& path);

} // namespace affect::fv
