#pragma once

#include <string>
#include <vector>

namespace funkmean {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG with one polyline (and markers) per series and a legend.
std::string render_svg_plot(const std::vector<PlotSeries>& series, const std::string& title,
                            const std::string& x_label, const std::string& y_label);

/// Writes `content` to `path`, throwing IOFailure on error.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace funkmean
