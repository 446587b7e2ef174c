#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtlab/experiments.hpp"

namespace mtlab {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // plotted in the given order
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

struct AxisRange {
  double lo = 0;
  double hi = 1;
};

/// Data extent padded by 5% per side; [0, 1] without data, +-1 around a
/// single value.
std::pair<AxisRange, AxisRange> plot_ranges(const PlotSpec& spec);

/// Self-contained SVG, byte-identical for identical input.
std::string render_svg(const PlotSpec& spec);

/// Chooses the plot for a summary table by its schema: equality rate,
/// m_used/(n ln n) median or m50/(n ln n) against n. Throws
/// std::invalid_argument for a schema without a plot.
PlotSpec plot_from_summary(const Table& summary);

}  // namespace mtlab
