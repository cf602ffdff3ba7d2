#include "coopnav/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace coopnav {

namespace {

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels,
                       const std::string& x_label, int width,
                       int panel_height) {
  const int margin_left = 70, margin_right = 20, margin_top = 30,
            margin_bottom = 40;
  const int total_height =
      static_cast<int>(panels.size()) * panel_height + margin_bottom;

  Extent xe;
  for (const auto& panel : panels) {
    for (const auto& s : panel.series)
      for (double v : s.x) xe.include(v);
    for (const auto& b : panel.bands)
      for (double v : b.x) xe.include(v);
  }
  xe.pad();

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << total_height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& panel = panels[p];
    const int top = static_cast<int>(p) * panel_height + margin_top;
    const int bottom = static_cast<int>(p + 1) * panel_height - 10;
    const int left = margin_left;
    const int right = width - margin_right;

    Extent ye;
    for (const auto& s : panel.series)
      for (double v : s.y) ye.include(v);
    for (const auto& b : panel.bands) {
      for (double v : b.lo) ye.include(v);
      for (double v : b.hi) ye.include(v);
    }
    ye.pad();

    auto sx = [&](double v) {
      return left + (v - xe.lo) / (xe.hi - xe.lo) * (right - left);
    };
    auto sy = [&](double v) {
      return bottom - (v - ye.lo) / (ye.hi - ye.lo) * (bottom - top);
    };

    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\""
        << right - left << "\" height=\"" << bottom - top
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"" << top - 8
        << "\" font-size=\"14\">" << panel.title << "</text>\n";
    svg << "<text x=\"12\" y=\"" << (top + bottom) / 2
        << "\" font-size=\"12\" transform=\"rotate(-90 12 "
        << (top + bottom) / 2 << ")\">" << panel.y_label << "</text>\n";

    // Axis reference lines and labels.
    for (double frac : {0.0, 0.5, 1.0}) {
      const double yv = ye.lo + frac * (ye.hi - ye.lo);
      svg << "<line x1=\"" << left << "\" y1=\"" << num(sy(yv)) << "\" x2=\""
          << right << "\" y2=\"" << num(sy(yv))
          << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
      svg << "<text x=\"" << left - 6 << "\" y=\"" << num(sy(yv) + 4)
          << "\" font-size=\"10\" text-anchor=\"end\">" << num(yv)
          << "</text>\n";
    }

    for (const auto& band : panel.bands) {
      if (band.x.empty()) continue;
      svg << "<polygon fill=\"" << band.color
          << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < band.x.size(); ++i) {
        svg << num(sx(band.x[i])) << ',' << num(sy(band.hi[i])) << ' ';
      }
      for (std::size_t i = band.x.size(); i-- > 0;) {
        svg << num(sx(band.x[i])) << ',' << num(sy(band.lo[i])) << ' ';
      }
      svg << "\"/>\n";
    }

    for (const auto& series : panel.series) {
      if (series.x.empty()) continue;
      svg << "<polyline fill=\"none\" stroke=\"" << series.color
          << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < series.x.size(); ++i) {
        svg << num(sx(series.x[i])) << ',' << num(sy(series.y[i])) << ' ';
      }
      svg << "\"/>\n";
    }

    // Legend.
    int lx = left + 10;
    for (const auto& series : panel.series) {
      if (series.label.empty()) continue;
      svg << "<line x1=\"" << lx << "\" y1=\"" << top + 12 << "\" x2=\""
          << lx + 18 << "\" y2=\"" << top + 12 << "\" stroke=\""
          << series.color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << lx + 22 << "\" y=\"" << top + 16
          << "\" font-size=\"11\">" << series.label << "</text>\n";
      lx += 24 + static_cast<int>(series.label.size()) * 7;
    }
  }

  svg << "<text x=\"" << width / 2 << "\" y=\"" << total_height - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace coopnav
