#include "svshrink/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace svshrink {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

Matrix read_csv_matrix(std::istream& in, bool header) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = !header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<double> row;
        std::string_view rest(line);
        std::size_t col = 0;
        for (;;) {
            ++col;
            const auto comma = rest.find(',');
            const std::string_view cell = trim(rest.substr(0, comma));
            std::string_view digits = cell;
            if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
            if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() ||
                !std::isfinite(v)) {
                throw CsvError("non-numeric cell '" + std::string(cell) + "'", line_no, col);
            }
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw CsvError("ragged row: expected " + std::to_string(rows.front().size()) +
                               " cells, found " + std::to_string(row.size()),
                           line_no, 0);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvError("empty matrix", 0, 0);
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_csv_matrix(std::ostream& out, const Matrix& m) {
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace svshrink
