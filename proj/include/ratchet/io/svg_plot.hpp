#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace ratchet::io {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 400;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Plain line plot with axes, five ticks per axis and a legend.
inline std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto tx = [&](double x) { return opt.log_x ? std::log10(x) : x; };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (opt.log_x && s.x[i] <= 0.0)) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(opt.width) + "\" height=\"" + std::to_string(opt.height) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::fmt("%.1f", left + pw / 2) + "\" y=\"20\" text-anchor=\"middle\">" +
         detail::escape(opt.title) + "</text>\n";
  svg += "<rect x=\"" + detail::fmt("%.1f", left) + "\" y=\"" + detail::fmt("%.1f", top) +
         "\" width=\"" + detail::fmt("%.1f", pw) + "\" height=\"" + detail::fmt("%.1f", ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double xv = opt.log_x ? std::pow(10.0, fx) : fx;
    const double sx = left + pw * k / 4.0;
    svg += "<text x=\"" + detail::fmt("%.1f", sx) + "\" y=\"" +
           detail::fmt("%.1f", top + ph + 16) + "\" text-anchor=\"middle\">" +
           detail::fmt("%.3g", xv) + "</text>\n";
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    svg += "<text x=\"" + detail::fmt("%.1f", left - 6) + "\" y=\"" +
           detail::fmt("%.1f", py(yv) + 4) + "\" text-anchor=\"end\">" + detail::fmt("%.3g", yv) +
           "</text>\n";
  }
  svg += "<text x=\"" + detail::fmt("%.1f", left + pw / 2) + "\" y=\"" +
         detail::fmt("%.1f", top + ph + 38) + "\" text-anchor=\"middle\">" +
         detail::escape(opt.x_label) + "</text>\n";
  svg += "<text x=\"14\" y=\"" + detail::fmt("%.1f", top + ph / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         detail::fmt("%.1f", top + ph / 2) + ")\">" + detail::escape(opt.y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % 6];
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!std::isfinite(series[s].y[i]) || (opt.log_x && series[s].x[i] <= 0.0)) continue;
      pts += detail::fmt("%.2f", px(series[s].x[i])) + "," +
             detail::fmt("%.2f", py(series[s].y[i])) + " ";
    }
    svg += std::string("<polyline fill=\"none\" stroke=\"") + color +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    svg += "<text x=\"" + detail::fmt("%.1f", left + pw - 4) + "\" y=\"" +
           detail::fmt("%.1f", top + 16 + 14.0 * static_cast<double>(s)) + "\" text-anchor=\"end\" fill=\"" +
           color + "\">" + detail::escape(series[s].name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace ratchet::io
