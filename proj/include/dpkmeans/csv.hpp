#pragma once

// CSV ingestion for feature matrices: rectangular numeric rows, optional
// auto-detected header, optional label column to drop.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpkmeans/core.hpp"

namespace dpkmeans {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace detail

// Rows become points; a non-numeric first row is treated as a header; the
// label column, when given, is dropped from every row. Parse failures report
// 1-based line numbers.
inline Dataset load_csv(const std::string& path, std::optional<std::size_t> label_column = {}) {
    std::ifstream in(path);
    if (!in) throw CsvError("load_csv: cannot open '" + path + "'");
    std::vector<double> values;
    std::size_t n_dims = 0;
    std::size_t line_no = 0;
    std::size_t rows = 0;
    std::string line;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank line
        const std::vector<std::string> fields = detail::split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        for (const std::string& f : fields) {
            double v;
            if (!detail::parse_double(f, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!header_checked) {
            header_checked = true;
            if (!numeric) continue;  // header row
        }
        if (!numeric)
            throw CsvError("load_csv: non-numeric cell at line " + std::to_string(line_no) + " of '" +
                           path + "'");
        if (label_column) {
            if (*label_column >= row.size())
                throw CsvError("load_csv: label column " + std::to_string(*label_column) +
                               " out of range at line " + std::to_string(line_no));
            row.erase(row.begin() + static_cast<std::ptrdiff_t>(*label_column));
        }
        if (row.empty())
            throw CsvError("load_csv: no feature columns left at line " + std::to_string(line_no));
        if (rows == 0) {
            n_dims = row.size();
        } else if (row.size() != n_dims) {
            throw CsvError("load_csv: ragged row at line " + std::to_string(line_no) + " (got " +
                           std::to_string(row.size()) + " fields, expected " + std::to_string(n_dims) +
                           ")");
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw CsvError("load_csv: no data rows in '" + path + "'");
    return make_dataset(std::move(values), n_dims);
}

}  // namespace dpkmeans
