#pragma once

#include <string>
#include <vector>

namespace muskat::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;
};

struct Plot {
  std::string title, xlabel, ylabel;
  bool log_x = false, log_y = false;
  std::vector<Series> series;
};

/// Polyline plot as a standalone SVG document. Non-finite points (and
/// non-positive ones on log axes) are skipped.
std::string render(const Plot& p);
void write(const std::string& path, const Plot& p);

}  // namespace muskat::svg
