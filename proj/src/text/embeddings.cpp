#include "affect/text/embeddings.hpp"

#include <charconv>

#include "affect/common/csv.hpp"
#include "affect/common/errors.hpp"

namespace affect::text {

const double* EmbeddingTable::find(std::string_view word) const {
    auto it = index.find(std::string(word));
    if (it == index.end()) return nullptr;
    return vectors.data() + static_cast<std::ptrdiff_t>(it->second) * static_cast<std::ptrdiff_t>(dim);
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::size_t parse_count(std::string_view s, std::size_t line_no) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw DataError("embeddings line " + std::to_string(line_no) + ": bad header field '" + std::string(s) + "'");
    return v;
}

} // namespace

EmbeddingTable parse_embeddings(std::string_view content, Diagnostics* diag) {
    EmbeddingTable table;
    std::vector<std::vector<double>> rows;
    std::size_t declared = 0, data_rows = 0;
    bool header = false;
    std::size_t line_no = 0, start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        const std::string_view line = content.substr(start, end - start);
        start = end + 1;
        ++line_no;
        const auto fields = split_spaces(line);
        if (fields.empty()) continue;
        if (!header) {
            if (fields.size() != 2) throw DataError("embeddings line 1: expected header 'count dim'");
            declared = parse_count(fields[0], line_no);
            table.dim = parse_count(fields[1], line_no);
            if (table.dim == 0) throw DataError("embeddings line 1: dimension must be positive");
            header = true;
            continue;
        }
        if (fields.size() != table.dim + 1)
            throw DataError("embeddings line " + std::to_string(line_no) + ": expected " + std::to_string(table.dim) +
                            " values, found " + std::to_string(fields.size() - 1));
        std::vector<double> values(table.dim);
        for (std::size_t d = 0; d < table.dim; ++d) {
            values[d] = parse_real(fields[d + 1], "embeddings line " + std::to_string(line_no));
        }
        const std::string word(fields[0]);
        if (table.index.count(word)) {
            warn(diag, "embeddings line " + std::to_string(line_no) + ": duplicate word '" + word +
                           "' ignored (first occurrence kept)");
            ++data_rows;
            continue;
        }
        table.index.emplace(word, table.words.size());
        table.words.push_back(word);
        rows.push_back(std::move(values));
        ++data_rows;
    }
    if (!header) throw DataError("embeddings: missing header line");
    if (data_rows != declared)
        throw DataError("embeddings: header declares " + std::to_string(declared) + " rows, found " +
                        std::to_string(data_rows));
    table.vectors.resize(static_cast<Eigen::Index>(table.words.size()), static_cast<Eigen::Index>(table.dim));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t d = 0; d < table.dim; ++d)
            table.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = rows[r][d];
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, Diagnostics* diag) {
    return parse_embeddings(read_text_file(path), diag);
}

Eigen::VectorXd embed_average(const EmbeddingTable& table, const TokenSeq& doc, Diagnostics* diag) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.dim));
    std::size_t hits = 0;
    for (const auto& tok : doc) {
        auto it = table.index.find(lowercase(tok.surface));
        if (it == table.index.end()) continue;
        sum += table.vectors.row(static_cast<Eigen::Index>(it->second)).transpose();
        ++hits;
    }
    if (hits == 0) {
        warn(diag, "embedding average: no token of the document is in the table; using the zero vector");
        return sum;
    }
    return sum / static_cast<double>(hits);
}

} // namespace affect::text
