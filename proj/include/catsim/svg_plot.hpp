#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>

#include "catsim/experiment_harness.hpp"

// Minimal static SVG line plot: axes, model curve, shot estimates.

namespace catsim {

namespace detail {
inline std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace detail

inline std::string render_scan_svg(const ScanResult& r) {
  const int width = 640, height = 420;
  const double ml = 60, mr = 20, mt = 30, mb = 45;
  const double pw = width - ml - mr, ph = height - mt - mb;

  const double xmin = *std::min_element(r.swept.begin(), r.swept.end());
  const double xmax = *std::max_element(r.swept.begin(), r.swept.end());
  double ymax = 0.55;
  for (double v : r.estimate) ymax = std::max(ymax, v);
  const double xspan = (xmax > xmin) ? (xmax - xmin) : 1.0;

  auto px = [&](double x) { return ml + (x - xmin) / xspan * pw; };
  auto py = [&](double y) { return mt + (1.0 - y / ymax) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << ml << "\" y=\"18\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << scan_kind_name(r.kind) << " seed " << r.seed << " (" << r.engine
      << ", " << r.geometry << ")</text>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = xmin + xspan * k / 4.0;
    svg << "<text x=\"" << detail::fmt6(px(x)) << "\" y=\"" << mt + ph + 18
        << "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"middle\">"
        << detail::fmt6(x) << "</text>\n";
  }
  for (double y : {0.0, 0.25, 0.5}) {
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << detail::fmt6(py(y) + 3)
        << "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"end\">"
        << detail::fmt6(y) << "</text>\n";
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << detail::fmt6(py(y))
        << "\" x2=\"" << ml << "\" y2=\"" << detail::fmt6(py(y))
        << "\" stroke=\"black\"/>\n";
  }

  // model curve
  svg << "<polyline fill=\"none\" stroke=\"#2166ac\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < r.swept.size(); ++i) {
    svg << detail::fmt6(px(r.swept[i])) << ',' << detail::fmt6(py(r.model[i]))
        << ' ';
  }
  svg << "\"/>\n";

  // shot estimates
  if (r.shots > 0) {
    for (std::size_t i = 0; i < r.swept.size(); ++i) {
      svg << "<circle cx=\"" << detail::fmt6(px(r.swept[i])) << "\" cy=\""
          << detail::fmt6(py(r.estimate[i]))
          << "\" r=\"2\" fill=\"#333333\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace catsim
