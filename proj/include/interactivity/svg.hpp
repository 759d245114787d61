#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace interactivity::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line plot: one polyline per series, labeled axes, fixed palette.
/// No external renderer involved; every sample becomes one polyline point.
void write_line_plot(std::ostream& out, const std::vector<Series>& series,
                     const std::string& x_label, const std::string& y_label,
                     const std::string& title);

void write_line_plot(const std::string& path, const std::vector<Series>& series,
                     const std::string& x_label, const std::string& y_label,
                     const std::string& title);

}  // namespace interactivity::svg
