#include "dphide/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include "dphide/csv.hpp"
#include "dphide/errors.hpp"

namespace dphide {

std::vector<double> read_values(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    double v = 0.0;
    try {
      v = csv::parse_number(token);
    } catch (const InputError&) {
      throw InputError(source + ": line " + std::to_string(line_no) +
                       ": not a number: '" + token + "'");
    }
    if (!std::isfinite(v)) {
      throw InputError(source + ": line " + std::to_string(line_no) +
                       ": value is not finite");
    }
    values.push_back(v);
  }
  if (values.empty()) throw InputError(source + ": no values");
  return values;
}

std::vector<double> load_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read data file '" + path + "'");
  return read_values(in, path);
}

std::uint64_t values_checksum(std::span<const double> values) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (double v : values) {
    for (char c : csv::format_number(v) + "\n") {
      hash ^= static_cast<unsigned char>(c);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

const std::vector<double>& newcomb_data() {
  static const std::vector<double> data = [] {
    std::vector<double> v{28, 26, 33, 24, 34, -44, 27, 16, 40, -2, 29, 22, 24, 21,
                          25, 30, 23, 29, 31, 19, 24, 20, 36, 32, 36, 28, 25, 21,
                          28, 29, 37, 25, 28, 26, 30, 32, 36, 26, 30, 22, 36, 23,
                          27, 27, 28, 27, 31, 27, 26, 33, 26, 32, 32, 24, 39, 28,
                          24, 25, 32, 25, 29, 27, 28, 29, 16, 23};
    if (values_checksum(v) != kNewcombChecksum) {
      throw std::logic_error("bundled Newcomb data fails its checksum");
    }
    return v;
  }();
  return data;
}

const std::vector<double>& bundled_dataset(const std::string& name) {
  if (name == "newcomb") return newcomb_data();
  throw InputError("unknown bundled dataset '" + name + "'");
}

}  // namespace dphide
