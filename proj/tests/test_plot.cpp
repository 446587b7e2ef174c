#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mtlab/plot.hpp"

using namespace mtlab;

namespace {

PlotSpec golden_spec() {
  PlotSpec spec;
  spec.title = "demo & <check>";
  spec.x_label = "n";
  spec.y_label = "rate";
  spec.series.push_back({"s=2", {{100, 0.9}, {200, 0.95}, {400, 1.0}}});
  spec.series.push_back({"s=3", {{100, 0.4}, {200, 0.6}}});
  return spec;
}

std::string golden_path() { return std::string(MTLAB_TEST_DATA) + "/plot_golden.svg"; }

}  // namespace

TEST_CASE("empty spec renders axes") {
  PlotSpec spec;
  spec.title = "empty";
  const auto [x, y] = plot_ranges(spec);
  CHECK(x.lo == 0);
  CHECK(x.hi == 1);
  CHECK(y.lo == 0);
  CHECK(y.hi == 1);
  const std::string svg = render_svg(spec);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<line") != std::string::npos);
  CHECK(svg.find("<polyline") == std::string::npos);
}

TEST_CASE("ranges cover the data") {
  const PlotSpec spec = golden_spec();
  const auto [x, y] = plot_ranges(spec);
  for (const auto& s : spec.series) {
    for (const auto& [px, py] : s.points) {
      CHECK(x.lo < px);
      CHECK(px < x.hi);
      CHECK(y.lo < py);
      CHECK(py < y.hi);
    }
  }
  CHECK(x.lo == doctest::Approx(85));
  CHECK(x.hi == doctest::Approx(415));
  PlotSpec single;
  single.series.push_back({"one", {{3, 7}}});
  const auto [sx, sy] = plot_ranges(single);
  CHECK(sx.lo == doctest::Approx(2));
  CHECK(sx.hi == doctest::Approx(4));
  CHECK(sy.lo == doctest::Approx(6));
}

TEST_CASE("svg matches the frozen rendering") {
  const std::string svg = render_svg(golden_spec());
  CHECK(svg == render_svg(golden_spec()));
  CHECK(svg.find("demo &amp; &lt;check&gt;") != std::string::npos);
  if (std::getenv("MTLAB_UPDATE_GOLDEN")) {
    std::ofstream(golden_path()) << svg;
  }
  std::ifstream in(golden_path());
  REQUIRE(in.good());
  std::stringstream frozen;
  frozen << in.rdbuf();
  CHECK(svg == frozen.str());
}

TEST_CASE("plot from summary tables") {
  Table hitting{"mtlab.hitting_time.summary/1",
                {"n", "trials", "equalities", "equality_rate", "lower_violations"},
                {{"50", "10", "9", "0.9", "0"}, {"100", "10", "10", "1", "0"}},
                {}};
  const PlotSpec h = plot_from_summary(hitting);
  REQUIRE(h.series.size() == 1);
  CHECK(h.series[0].points.size() == 2);
  CHECK(h.series[0].points[1].second == doctest::Approx(1.0));

  Table threshold{"mtlab.threshold_scan.summary/1",
                  {"n", "s", "trials", "successes", "ratio_q1", "ratio_median", "ratio_q3"},
                  {{"100", "2", "5", "5", "1", "1.2", "1.4"}, {"100", "3", "5", "5", "1.5", "1.6", "1.8"}},
                  {}};
  CHECK(plot_from_summary(threshold).series.size() == 2);

  Table other{"mtlab.unknown/1", {"n"}, {}, {}};
  CHECK_THROWS_AS(plot_from_summary(other), std::invalid_argument);
}
