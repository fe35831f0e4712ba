#pragma once

#include <string>
#include <vector>

namespace signtest::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal self-contained SVG line chart: axes with ticks, one polyline per
// series and a legend. Output depends only on the inputs.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series);

}  // namespace signtest::cli
