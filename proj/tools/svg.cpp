#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cli.hpp"

namespace pdmp::cli {

namespace {

constexpr double kWidth = 720, kHeight = 360;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 45;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(x) < 1e-12 ? 0.0 : x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Ticks at 1, 2 or 5 times a power of ten, about five per axis.
std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v);
  return t;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      const double w = std::max(1.0, std::abs(lo)) * 0.5;
      lo -= w;
      hi += w;
    } else {
      const double w = 0.05 * (hi - lo);
      lo -= w;
      hi += w;
    }
  }
};

bool is_error_column(const std::string& name) { return name == "stderr" || name == "tail_bound"; }

}  // namespace

std::string emit_svg(const ResultTable& table, PlotKind kind, const std::string& title) {
  if (table.rows.empty() || table.columns.size() < 2) throw std::invalid_argument("emit_svg: empty table");

  std::vector<std::size_t> ycols;
  std::size_t se_col = table.columns.size();
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    if (table.columns[c] == "stderr") se_col = c;
    if (!is_error_column(table.columns[c])) ycols.push_back(c);
  }
  if (ycols.empty()) throw std::invalid_argument("emit_svg: no y column");
  const bool band = kind == PlotKind::line_with_band && se_col < table.columns.size();

  Range xr, yr;
  for (const auto& row : table.rows) {
    xr.add(row[0]);
    for (std::size_t c : ycols) yr.add(row[c]);
    if (band) {
      yr.add(row[ycols[0]] - 2 * row[se_col]);
      yr.add(row[ycols[0]] + 2 * row[se_col]);
    }
  }
  if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo)) throw std::invalid_argument("emit_svg: no finite data");
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto X = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto Y = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream s;
  s << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
    << R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="720" height="360" viewBox="0 0 720 360">)"
    << '\n'
    << R"(<rect x="0" y="0" width="720" height="360" fill="white"/>)" << '\n';
  if (!title.empty())
    s << R"(<text x="360" y="18" text-anchor="middle" font-family="sans-serif" font-size="13">)" << escape(title)
      << "</text>\n";

  // Grid and ticks.
  s << R"(<g font-family="sans-serif" font-size="10" fill="#333">)" << '\n';
  for (double t : nice_ticks(xr.lo, xr.hi)) {
    s << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(X(t)) << "\" y2=\""
      << num(kTop + ph) << "\" stroke=\"#e6e6e6\"/>\n";
    s << "<text x=\"" << num(X(t)) << "\" y=\"" << num(kTop + ph + 14) << "\" text-anchor=\"middle\">"
      << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(yr.lo, yr.hi)) {
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
      << num(Y(t)) << "\" stroke=\"#e6e6e6\"/>\n";
    s << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(Y(t) + 3) << "\" text-anchor=\"end\">" << tick_label(t)
      << "</text>\n";
  }
  s << "</g>\n";
  if (yr.lo < 0 && yr.hi > 0)
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(Y(0)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
      << num(Y(0)) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  s << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"#333\"/>\n";

  if (band) {
    s << "<polygon fill=\"" << kPalette[0] << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (const auto& row : table.rows) s << num(X(row[0])) << ',' << num(Y(row[ycols[0]] + 2 * row[se_col])) << ' ';
    for (auto it = table.rows.rbegin(); it != table.rows.rend(); ++it)
      s << num(X((*it)[0])) << ',' << num(Y((*it)[ycols[0]] - 2 * (*it)[se_col])) << ' ';
    s << "\"/>\n";
  }

  for (std::size_t k = 0; k < ycols.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    const std::size_t c = ycols[k];
    if (table.rows.size() == 1) {
      s << "<circle cx=\"" << num(X(table.rows[0][0])) << "\" cy=\"" << num(Y(table.rows[0][c]))
        << "\" r=\"4\" fill=\"" << color << "\"/>\n";
      continue;
    }
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& row : table.rows)
      if (std::isfinite(row[0]) && std::isfinite(row[c])) s << num(X(row[0])) << ',' << num(Y(row[c])) << ' ';
    s << "\"/>\n";
  }

  // Axis labels and legend.
  s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 8)
    << R"(" text-anchor="middle" font-family="sans-serif" font-size="12">)" << escape(table.columns[0]) << "</text>\n";
  for (std::size_t k = 0; k < ycols.size(); ++k) {
    const double ly = kTop + 14 + 14 * static_cast<double>(k);
    s << "<line x1=\"" << num(kLeft + pw - 110) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(kLeft + pw - 90)
      << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << kPalette[k % std::size(kPalette)]
      << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << num(kLeft + pw - 84) << "\" y=\"" << num(ly)
      << R"(" font-family="sans-serif" font-size="11">)" << escape(table.columns[ycols[k]]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace pdmp::cli
