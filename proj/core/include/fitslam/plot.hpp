#pragma once

#include <string>
#include <vector>

namespace fitslam {

struct PlotSeries {
  std::string label;
  std::string color;  ///< any SVG color
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotLabels {
  std::string title;
  std::string x_axis;
  std::string y_axis;
};

/// Static SVG line chart with axes, ticks and a legend. Non-finite points
/// are skipped.
std::string line_chart_svg(const std::vector<PlotSeries>& series, const PlotLabels& labels, int width = 720,
                           int height = 440);

}  // namespace fitslam
