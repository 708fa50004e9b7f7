#pragma once

#include "svshrink/model.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace svshrink {

/// Malformed CSV input; row and column are 1-based (0 when not applicable).
class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::size_t row, std::size_t column)
        : std::runtime_error(what), row_(row), column_(column) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Row-major, comma-delimited numeric matrix. Blank lines are skipped; with
/// `header` the first non-blank line is ignored.
Matrix read_csv_matrix(std::istream& in, bool header = false);

/// Writes with 17 significant digits so values round-trip exactly.
void write_csv_matrix(std::ostream& out, const Matrix& m);

}  // namespace svshrink
