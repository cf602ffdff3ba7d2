#pragma once

#include <string>
#include <vector>

namespace coopnav {

/// Minimal static plot writer (SVG polylines). Enough for error-vs-time
/// and ENU-vs-time figures with 3-sigma envelopes.
struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
};

struct PlotBand {
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string color = "#1f77b4";
};

struct PlotPanel {
  std::string title;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::vector<PlotBand> bands;
};

/// Render stacked panels sharing an x axis into one SVG document.
std::string render_svg(const std::vector<PlotPanel>& panels,
                       const std::string& x_label, int width = 900,
                       int panel_height = 220);

}  // namespace coopnav
