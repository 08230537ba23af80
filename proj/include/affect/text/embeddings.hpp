#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "affect/common/diagnostics.hpp"
#include "affect/text/tokenize.hpp"

namespace affect::text {

struct EmbeddingTable {
    std::size_t dim = 0;
    std::vector<std::string> words;
    std::unordered_map<std::string, std::size_t> index;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> vectors;  // words.size() x dim

    /// Start of the word's row (dim values), or nullptr.
    const double* find(std::string_view word) const;
    std::size_t size() const { return words.size(); }
};

/// Text format: header "count dim", then "word v1 ... v_dim" per line.
/// Rows with the wrong number of values and a row count that disagrees with
/// the header are DataErrors naming the line. Duplicate words keep the first
/// occurrence with a warning.
EmbeddingTable load_embeddings(const std::filesystem::path& path, Diagnostics* diag = nullptr);
EmbeddingTable parse_embeddings(std::string_view content, Diagnostics* diag = nullptr);

/// Mean vector of the tokens found in the table (looked up lowercased). A
/// document without known tokens yields the zero vector and a warning.
Eigen::VectorXd embed_average(const EmbeddingTable& table, const TokenSeq& doc, Diagnostics* diag = nullptr);

} // namespace affect::text
