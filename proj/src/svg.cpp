#include "interactivity/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace interactivity::svg {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;  // room for the legend
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_line_plot(std::ostream& out, const std::vector<Series>& series,
                     const std::string& x_label, const std::string& y_label,
                     const std::string& title) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("svg: series x/y length mismatch");
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  // axes
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\""
      << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";
  // extremal ticks
  out << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - 30
      << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xmin) << "</text>\n";
  out << "<text x=\"" << kMarginLeft + plot_w << "\" y=\"" << kHeight - 30
      << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xmax) << "</text>\n";
  out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << kMarginTop + plot_h
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymin) << "</text>\n";
  out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << kMarginTop + 4
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(ymax) << "</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (size_t p = 0; p < s.x.size(); ++p) {
      if (p) out << ' ';
      out << fmt(sx(s.x[p])) << ',' << fmt(sy(s.y[p]));
    }
    out << "\"/>\n";
    const double ly = kMarginTop + 14.0 * static_cast<double>(i + 1);
    out << "<line x1=\"" << kMarginLeft + plot_w + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kMarginLeft + plot_w + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kMarginLeft + plot_w + 34 << "\" y=\"" << ly
        << "\" font-size=\"11\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

void write_line_plot(const std::string& path, const std::vector<Series>& series,
                     const std::string& x_label, const std::string& y_label,
                     const std::string& title) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_line_plot(out, series, x_label, y_label, title);
}

}  // namespace interactivity::svg
