#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "copeq/sample.hpp"

namespace copeq {

/** Parse failure with 1-based row/column location. */
struct CsvError : std::runtime_error {
    std::size_t row = 0;
    std::size_t col = 0;
    CsvError(const std::string& msg, std::size_t r, std::size_t c)
        : std::runtime_error(msg + " (row " + std::to_string(r) + ", column " +
                             std::to_string(c) + ")"),
          row(r),
          col(c) {}
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding blanks and an optional CR
        std::size_t b = cell.find_first_not_of(" \t\r");
        std::size_t e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{}
                                               : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && !s.empty();
}

struct RawCsv {
    std::vector<std::string> header;  // empty if the file has none
    std::vector<std::vector<std::string>> rows;
};

inline RawCsv read_csv(const std::string& path, bool force_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    RawCsv out;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_line(line);
        if (out.rows.empty() && out.header.empty()) {
            width = cells.size();
            bool any_text = false;
            double tmp;
            for (const auto& c : cells)
                if (!parse_double(c, tmp)) any_text = true;
            if (force_header || any_text) {
                out.header = std::move(cells);
                continue;
            }
        }
        if (cells.size() != width)
            throw CsvError("inconsistent field count", lineno, cells.size());
        out.rows.push_back(std::move(cells));
    }
    if (out.rows.empty()) throw std::runtime_error(path + ": no data rows");
    return out;
}

} // namespace detail

/**
 * Load an all-numeric CSV as one sample. A first row with any non-numeric
 * cell is taken as a header.
 */
inline Sample load_csv_sample(const std::string& path) {
    const auto raw = detail::read_csv(path, false);
    const std::size_t p = raw.rows[0].size();
    Matrix m(raw.rows.size(), p);
    const std::size_t header_offset = raw.header.empty() ? 1 : 2;
    for (std::size_t i = 0; i < raw.rows.size(); ++i)
        for (std::size_t j = 0; j < p; ++j)
            if (!detail::parse_double(raw.rows[i][j], m(i, j)))
                throw CsvError("not a number: '" + raw.rows[i][j] + "'",
                               i + header_offset, j + 1);
    return Sample(std::move(m));
}

/**
 * Load a CSV with a label column and split the numeric remainder into one
 * sample per label, ordered by first appearance. Requires a header row.
 */
inline std::pair<std::vector<Sample>, std::vector<std::string>>
load_csv_groups(const std::string& path, const std::string& group_col) {
    const auto raw = detail::read_csv(path, true);
    std::size_t gcol = raw.header.size();
    for (std::size_t j = 0; j < raw.header.size(); ++j)
        if (raw.header[j] == group_col) gcol = j;
    if (gcol == raw.header.size())
        throw std::runtime_error(path + ": no column named '" + group_col + "'");

    std::vector<std::string> labels;
    std::vector<std::vector<std::vector<double>>> groups;
    const std::size_t p = raw.rows[0].size() - 1;
    if (p < 2) throw std::runtime_error(path + ": need >= 2 numeric columns");
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        const auto& cells = raw.rows[i];
        const std::string& label = cells[gcol];
        std::size_t g = labels.size();
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (labels[k] == label) g = k;
        if (g == labels.size()) {
            labels.push_back(label);
            groups.emplace_back();
        }
        std::vector<double> row;
        row.reserve(p);
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == gcol) continue;
            double v;
            if (!detail::parse_double(cells[j], v))
                throw CsvError("not a number: '" + cells[j] + "'", i + 2, j + 1);
            row.push_back(v);
        }
        groups[g].push_back(std::move(row));
    }

    std::vector<Sample> samples;
    samples.reserve(groups.size());
    for (const auto& rows : groups) {
        Matrix m(rows.size(), p);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < p; ++j) m(i, j) = rows[i][j];
        samples.emplace_back(std::move(m));
    }
    return {std::move(samples), std::move(labels)};
}

} // namespace copeq
