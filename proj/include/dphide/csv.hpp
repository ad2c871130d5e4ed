#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dphide::csv {

/// 10 significant digits, '.' decimal separator; NaN becomes an empty field.
std::string format_number(double value);

/// Inverse of format_number; an empty field parses as NaN. Throws
/// InputError on anything else that is not a complete number.
double parse_number(const std::string& field);

using Row = std::vector<std::string>;

void write_row(std::ostream& out, const Row& row);

/// Comma-separated rows without quoting. Blank lines are skipped.
std::vector<Row> read_rows(std::istream& in);

}  // namespace dphide::csv
