#pragma once

// Numeric data files (one value per line, '#' comment lines) and the bundled
// Newcomb light-speed sample.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dphide {

/// Parses one number per line; blank lines and lines whose first
/// non-blank character is '#' are skipped. Non-numeric or non-finite
/// entries raise InputError naming `source` and the line number; an input
/// without values is an InputError too.
std::vector<double> read_values(std::istream& in, const std::string& source = "input");
std::vector<double> load_values(const std::string& path);

/// FNV-1a 64 over the values printed with csv::format_number, each followed
/// by '\n'.
std::uint64_t values_checksum(std::span<const double> values);

inline constexpr std::uint64_t kNewcombChecksum = 0x32cfbf1b8b75e07bULL;

/// The 66 Newcomb passage-time deviations, verified against kNewcombChecksum.
const std::vector<double>& newcomb_data();

/// Bundled dataset by name ("newcomb"); InputError for unknown names.
const std::vector<double>& bundled_dataset(const std::string& name);

}  // namespace dphide
