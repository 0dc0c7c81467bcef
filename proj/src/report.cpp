// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "jbfmc/harness.hpp"

namespace jbfmc::harness {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_num(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("csv: bad number '" + std::string(s) + "'");
  return v;
}

double db(double linear) { return std::isnan(linear) ? linear : 10.0 * std::log10(linear); }

void write_file(const std::filesystem::path &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line = line.substr(pos + 1);
  }
  return out;
}

} // namespace

std::string format_csv(const SweepResult &result) {
  if (result.rows.empty()) throw ConfigError("csv: refusing to write an empty result");
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRow &r : result.rows) {
    out += r.method + ',' + r.axis1_name + ',' + num(r.axis1) + ',' + r.axis2_name + ',' +
           (r.axis2_name.empty() ? std::string() : num(r.axis2)) + ',' + num(db(r.nmse_g)) + ',' + num(db(r.nmse_h)) +
           ',' + num(r.fail_rate) + ',' + num(r.iterations) + ',' + num(r.wall_ms) + '\n';
  }
  return out;
}

void emit_csv(const SweepResult &result, const std::filesystem::path &path) { write_file(path, format_csv(result)); }

SweepResult parse_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != kCsvHeader) throw ConfigError("csv: missing or unexpected header");
  SweepResult out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 10) throw ConfigError("csv: line " + std::to_string(i + 1) + " does not have 10 fields");
    SweepRow r;
    r.method = std::string(f[0]);
    r.axis1_name = std::string(f[1]);
    r.axis1 = parse_num(f[2]);
    r.axis2_name = std::string(f[3]);
    r.axis2 = r.axis2_name.empty() ? 0.0 : parse_num(f[4]);
    r.nmse_g = std::pow(10.0, parse_num(f[5]) / 10.0);
    r.nmse_h = std::pow(10.0, parse_num(f[6]) / 10.0);
    r.fail_rate = parse_num(f[7]);
    r.iterations = parse_num(f[8]);
    r.wall_ms = parse_num(f[9]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

namespace {

constexpr std::array<const char *, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string color_map(double t) {
  // Dark blue (low NMSE) through teal and green to yellow (high NMSE).
  static constexpr std::array<std::array<double, 3>, 5> stops = {
      {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  if (std::isnan(t)) return "#cccccc";
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double w = t - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(stops[i][0] * (1 - w) + stops[i + 1][0] * w),
                static_cast<int>(stops[i][1] * (1 - w) + stops[i + 1][1] * w),
                static_cast<int>(stops[i][2] * (1 - w) + stops[i + 1][2] * w));
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
};

std::string line_plot(const SweepResult &result) {
  constexpr double panel_w = 420, panel_h = 300, margin = 60;
  std::vector<std::string> methods;
  Range x, y;
  for (const auto &r : result.rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    x.add(r.axis1);
    y.add(db(r.nmse_g));
    y.add(db(r.nmse_h));
  }
  if (!x.valid()) x = {0.0, 1.0};
  if (!y.valid()) y = {-1.0, 0.0};
  if (x.hi == x.lo) x.hi = x.lo + 1.0;
  y.lo = std::floor(y.lo / 5.0) * 5.0;
  y.hi = std::ceil(y.hi / 5.0) * 5.0;
  if (y.hi == y.lo) y.hi = y.lo + 5.0;

  std::ostringstream svg;
  const double width = 2 * (panel_w + margin) + margin, height = panel_h + 2 * margin + 20 * methods.size();
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::array<const char *, 2> titles = {"NMSE of G", "NMSE of H"};
  for (int panel = 0; panel < 2; ++panel) {
    const double ox = margin + panel * (panel_w + margin), oy = margin;
    auto px = [&](double v) { return ox + (v - x.lo) / (x.hi - x.lo) * panel_w; };
    auto py = [&](double v) { return oy + (y.hi - v) / (y.hi - y.lo) * panel_h; };
    svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << oy - 20 << "\" text-anchor=\"middle\">" << titles[panel]
        << "</text>\n";
    svg << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << panel_w << "\" height=\"" << panel_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t = y.lo; t <= y.hi + 1e-9; t += 5.0) {
      svg << "<line x1=\"" << ox << "\" x2=\"" << ox + panel_w << "\" y1=\"" << py(t) << "\" y2=\"" << py(t)
          << "\" stroke=\"#dddddd\"/>\n";
      svg << "<text x=\"" << ox - 6 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << t << "</text>\n";
    }
    std::vector<double> xs;
    for (const auto &r : result.rows)
      if (std::find(xs.begin(), xs.end(), r.axis1) == xs.end()) xs.push_back(r.axis1);
    for (double v : xs)
      svg << "<text x=\"" << px(v) << "\" y=\"" << oy + panel_h + 16 << "\" text-anchor=\"middle\">" << num(v)
          << "</text>\n";
    svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << oy + panel_h + 36 << "\" text-anchor=\"middle\">"
        << result.rows.front().axis1_name << "</text>\n";
    svg << "<text transform=\"translate(" << ox - 42 << "," << oy + panel_h / 2
        << ") rotate(-90)\" text-anchor=\"middle\">NMSE (dB)</text>\n";
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const char *color = kPalette[m % kPalette.size()];
      std::string points;
      for (const auto &r : result.rows) {
        if (r.method != methods[m]) continue;
        const double v = db(panel == 0 ? r.nmse_g : r.nmse_h);
        if (!std::isfinite(v)) continue;
        points += num(px(r.axis1)) + "," + num(py(v)) + " ";
        svg << "<circle cx=\"" << px(r.axis1) << "\" cy=\"" << py(v) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
          << "\"/>\n";
    }
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const double ly = margin + panel_h + 56 + 20 * m;
    svg << "<line x1=\"" << margin << "\" x2=\"" << margin + 24 << "\" y1=\"" << ly << "\" y2=\"" << ly
        << "\" stroke=\"" << kPalette[m % kPalette.size()] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << margin + 30 << "\" y=\"" << ly + 4 << "\">" << methods[m] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string heatmaps(const SweepResult &result) {
  constexpr double cell_w = 36, cell_h = 26, margin = 70, gap = 60;
  std::vector<std::string> methods;
  std::vector<double> xs, ys;
  Range z;
  for (const auto &r : result.rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    if (std::find(xs.begin(), xs.end(), r.axis1) == xs.end()) xs.push_back(r.axis1);
    if (std::find(ys.begin(), ys.end(), r.axis2) == ys.end()) ys.push_back(r.axis2);
    z.add(db(r.nmse_g));
    z.add(db(r.nmse_h));
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  if (!z.valid()) z = {-1.0, 0.0};
  if (z.hi == z.lo) z.hi = z.lo + 1.0;
  const double panel_w = cell_w * xs.size(), panel_h = cell_h * ys.size();
  const double width = margin + 2 * (panel_w + gap) + 80;
  const double height = margin + methods.size() * (panel_h + gap + 20) + 40;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (int panel = 0; panel < 2; ++panel) {
      const double ox = margin + panel * (panel_w + gap), oy = margin + m * (panel_h + gap + 20);
      svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << oy - 8 << "\" text-anchor=\"middle\">" << methods[m]
          << (panel == 0 ? ": NMSE of G (dB)" : ": NMSE of H (dB)") << "</text>\n";
      for (const auto &r : result.rows) {
        if (r.method != methods[m]) continue;
        const auto ix = std::find(xs.begin(), xs.end(), r.axis1) - xs.begin();
        const auto iy = std::find(ys.begin(), ys.end(), r.axis2) - ys.begin();
        const double v = db(panel == 0 ? r.nmse_g : r.nmse_h);
        // Higher axis2 values at the top.
        const double cx = ox + ix * cell_w, cy = oy + (ys.size() - 1 - iy) * cell_h;
        svg << "<rect x=\"" << cx << "\" y=\"" << cy << "\" width=\"" << cell_w << "\" height=\"" << cell_h
            << "\" fill=\"" << color_map((v - z.lo) / (z.hi - z.lo)) << "\"><title>" << num(v)
            << "</title></rect>\n";
      }
      for (std::size_t i = 0; i < xs.size(); ++i)
        svg << "<text x=\"" << ox + (i + 0.5) * cell_w << "\" y=\"" << oy + panel_h + 14
            << "\" text-anchor=\"middle\">" << num(xs[i]) << "</text>\n";
      for (std::size_t i = 0; i < ys.size(); ++i)
        svg << "<text x=\"" << ox - 4 << "\" y=\"" << oy + (ys.size() - 1 - i + 0.6) * cell_h
            << "\" text-anchor=\"end\">" << num(ys[i]) << "</text>\n";
      svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << oy + panel_h + 30 << "\" text-anchor=\"middle\">"
          << result.rows.front().axis1_name << "</text>\n";
    }
  }
  // Color bar.
  const double bx = width - 60, by = margin;
  for (int i = 0; i < 50; ++i)
    svg << "<rect x=\"" << bx << "\" y=\"" << by + (49 - i) * 4 << "\" width=\"16\" height=\"4\" fill=\""
        << color_map(i / 49.0) << "\"/>\n";
  svg << "<text x=\"" << bx + 20 << "\" y=\"" << by + 8 << "\">" << num(std::round(z.hi * 10) / 10) << "</text>\n";
  svg << "<text x=\"" << bx + 20 << "\" y=\"" << by + 200 << "\">" << num(std::round(z.lo * 10) / 10)
      << "</text>\n";
  svg << "<text x=\"" << margin - 40 << "\" y=\"" << margin - 30 << "\">rows: "
      << result.rows.front().axis2_name << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

} // namespace

std::string format_svg(const SweepResult &result) {
  if (result.rows.empty()) throw ConfigError("plot: refusing to draw an empty result");
  return result.rows.front().axis2_name.empty() ? line_plot(result) : heatmaps(result);
}

void emit_plot(const SweepResult &result, const std::filesystem::path &path) { write_file(path, format_svg(result)); }

} // namespace jbfmc::harness
