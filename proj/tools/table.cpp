#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "cli.hpp"

namespace pdmp::cli {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

void write_csv(std::ostream& os, const ResultTable& table) {
  for (const auto& [k, v] : table.meta) os << "# " << k << " = " << v << '\n';
  if (!table.run_info.empty()) {
    os << "#@ run\n";
    for (const auto& [k, v] : table.run_info) os << "#@ " << k << " = " << v << '\n';
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

std::string reproducible_part(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("#@", 0) == 0) continue;
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace pdmp::cli
