#include "mtlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mtlab {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 150;  // legend column
constexpr double kTop = 40;
constexpr double kBottom = 50;
constexpr int kTicks = 5;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

AxisRange pad(double lo, double hi) {
  if (lo > hi) return {0, 1};
  if (lo == hi) return {lo - 1, hi + 1};
  const double margin = 0.05 * (hi - lo);
  return {lo - margin, hi + margin};
}

}  // namespace

std::pair<AxisRange, AxisRange> plot_ranges(const PlotSpec& spec) {
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : spec.series) {
    for (const auto& [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  return {pad(x_lo, x_hi), pad(y_lo, y_hi)};
}

std::string render_svg(const PlotSpec& spec) {
  const auto [xr, yr] = plot_ranges(spec);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(spec.title) << "</text>\n";
  svg << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(plot_w)
      << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    svg << "<line x1=\"" << fixed(px(fx)) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\"" << fixed(px(fx))
        << "\" y2=\"" << fixed(kTop + plot_h + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(px(fx)) << "\" y=\"" << fixed(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
    svg << "<line x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(py(fy)) << "\" x2=\"" << fixed(kLeft)
        << "\" y2=\"" << fixed(py(fy)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(fy) + 4) << "\" text-anchor=\"end\">"
        << tick_label(fy) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 10)
      << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(kTop + plot_h / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        svg << (i ? " " : "") << fixed(px(s.points[i].first)) << ',' << fixed(py(s.points[i].second));
      }
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << fixed(px(x)) << "\" cy=\"" << fixed(py(y)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = kTop + 12 + 18 * static_cast<double>(k);
    svg << "<rect x=\"" << fixed(kWidth - kRight + 12) << "\" y=\"" << fixed(ly - 8)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << fixed(kWidth - kRight + 28) << "\" y=\"" << fixed(ly + 1) << "\">" << escape(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

PlotSpec plot_from_summary(const Table& summary) {
  const std::string name = summary.schema.substr(0, summary.schema.find('/'));
  PlotSpec spec;
  spec.x_label = "n";
  // One series per value of label_column, one point per n (first row wins).
  auto collect = [&](const std::string& y_column, const std::string& label_prefix, const std::string& label_column,
                     auto&& transform) {
    const std::size_t nc = summary.column("n");
    const std::size_t yc = summary.column(y_column);
    const std::size_t lc = label_column.empty() ? 0 : summary.column(label_column);
    std::map<std::string, std::size_t> index;
    std::map<std::pair<std::string, std::string>, bool> seen;
    for (const auto& row : summary.rows) {
      const std::string label = label_column.empty() ? label_prefix : label_prefix + row[lc];
      if (!seen.emplace(std::pair{label, row[nc]}, true).second) continue;
      if (row[yc] == "nan" || row[yc] == "none") continue;
      auto [it, fresh] = index.emplace(label, spec.series.size());
      if (fresh) spec.series.push_back({label, {}});
      const double n = std::stod(row[nc]);
      spec.series[it->second].points.emplace_back(n, transform(n, std::stod(row[yc])));
    }
    for (auto& s : spec.series) std::sort(s.points.begin(), s.points.end());
  };
  auto identity = [](double, double y) { return y; };
  if (name == "mtlab.hitting_time.summary") {
    spec.title = "m* = max(m1, m2) equality rate";
    spec.y_label = "equality rate";
    collect("equality_rate", "s=2", "", identity);
  } else if (name == "mtlab.threshold_scan.summary") {
    spec.title = "multitree construction cost";
    spec.y_label = "median m_used / (n ln n)";
    collect("ratio_median", "s=", "s", identity);
  } else if (name == "mtlab.multimatching_scan.summary") {
    spec.title = "multimatching 50% success point";
    spec.y_label = "m50 / (n ln n)";
    collect("m50_estimate", "", "mode", [](double n, double y) { return y / (n * std::log(n)); });
  } else {
    throw std::invalid_argument("no plot for schema '" + summary.schema + "'");
  }
  return spec;
}

}  // namespace mtlab
