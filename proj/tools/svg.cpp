#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace signtest::cli {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

constexpr const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

std::string fixed(double v, int digits) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
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

// Round step of the form {1, 2, 5} x 10^k giving about `target` ticks.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double base = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double f : {1.0, 2.0, 5.0}) {
    if (f * base >= raw) return f * base;
  }
  return 10.0 * base;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const Series& s : series) {
    for (const double v : s.x) {
      x_lo = std::min(x_lo, v);
      x_hi = std::max(x_hi, v);
    }
    for (const double v : s.y) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!(x_lo < x_hi)) {
    x_lo = std::isfinite(x_lo) ? x_lo - 1.0 : 0.0;
    x_hi = x_lo + 2.0;
  }
  if (!(y_lo < y_hi)) {
    y_lo = std::isfinite(y_lo) ? y_lo - 0.5 : 0.0;
    y_hi = y_lo + 1.0;
  }
  const double y_step = tick_step(y_hi - y_lo, 6);
  y_lo = std::floor(y_lo / y_step) * y_step;
  y_hi = std::ceil(y_hi / y_step) * y_step;
  const double x_step = tick_step(x_hi - x_lo, 8);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) {
    return kTop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fixed(kWidth, 0) + "\" height=\"" + fixed(kHeight, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(kLeft + plot_w / 2, 1) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";

  // Axes and ticks.
  svg += "<g stroke=\"black\" fill=\"none\">\n";
  svg += "<rect x=\"" + fixed(kLeft, 1) + "\" y=\"" + fixed(kTop, 1) +
         "\" width=\"" + fixed(plot_w, 1) + "\" height=\"" + fixed(plot_h, 1) +
         "\"/>\n";
  svg += "</g>\n<g font-size=\"11\">\n";
  const double x_first = std::ceil(x_lo / x_step) * x_step;
  for (double x = x_first; x <= x_hi + 1e-9 * x_step; x += x_step) {
    const double p = px(x);
    svg += "<line x1=\"" + fixed(p, 1) + "\" y1=\"" + fixed(kTop + plot_h, 1) +
           "\" x2=\"" + fixed(p, 1) + "\" y2=\"" + fixed(kTop + plot_h + 5, 1) +
           "\" stroke=\"black\"/>";
    svg += "<text x=\"" + fixed(p, 1) + "\" y=\"" +
           fixed(kTop + plot_h + 18, 1) + "\" text-anchor=\"middle\">" +
           fixed(x, x_step < 1 ? 2 : 0) + "</text>\n";
  }
  const int y_digits = std::max(0, static_cast<int>(-std::floor(std::log10(y_step))));
  for (double y = y_lo; y <= y_hi + 1e-9 * y_step; y += y_step) {
    const double p = py(y);
    svg += "<line x1=\"" + fixed(kLeft - 5, 1) + "\" y1=\"" + fixed(p, 1) +
           "\" x2=\"" + fixed(kLeft + plot_w, 1) + "\" y2=\"" + fixed(p, 1) +
           "\" stroke=\"#dddddd\"/>";
    svg += "<text x=\"" + fixed(kLeft - 8, 1) + "\" y=\"" + fixed(p + 4, 1) +
           "\" text-anchor=\"end\">" + fixed(y, y_digits) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + fixed(kLeft + plot_w / 2, 1) + "\" y=\"" +
         fixed(kHeight - 12, 1) + "\" text-anchor=\"middle\">" +
         escape(x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + fixed(kTop + plot_h / 2, 1) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) +
         "</text>\n";

  // Series and legend.
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const std::string colour = kPalette[i % std::size(kPalette)];
    svg += "<polyline fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (k > 0) svg += ' ';
      svg += fixed(px(s.x[k]), 2) + "," + fixed(py(s.y[k]), 2);
    }
    svg += "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    const double lx = kLeft + plot_w + 15;
    svg += "<line x1=\"" + fixed(lx, 1) + "\" y1=\"" + fixed(ly, 1) +
           "\" x2=\"" + fixed(lx + 22, 1) + "\" y2=\"" + fixed(ly, 1) +
           "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>";
    svg += "<text x=\"" + fixed(lx + 28, 1) + "\" y=\"" + fixed(ly + 4, 1) +
           "\">" + escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace signtest::cli
