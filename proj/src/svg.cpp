#include "pdfool/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pdfool {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 48.0;

std::string fmt(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

std::string fmt_tick(double v) {
  std::ostringstream out;
  out << std::setprecision(4) << v;
  return out.str();
}

}  // namespace

void write_line_svg(const std::vector<SvgSeries>& series,
                    const std::string& x_label, const std::string& y_label,
                    const std::filesystem::path& path) {
  if (series.empty()) {
    throw std::invalid_argument("write_line_svg: no series");
  }
  double x_min = series[0].x.minCoeff(), x_max = series[0].x.maxCoeff();
  double y_min = series[0].y.minCoeff(), y_max = series[0].y.maxCoeff();
  for (const SvgSeries& s : series) {
    if (s.x.size() != s.y.size() || s.x.size() < 2) {
      throw std::invalid_argument("write_line_svg: series '" + s.label +
                                  "' needs matching x/y with >= 2 points");
    }
    x_min = std::min(x_min, s.x.minCoeff());
    x_max = std::max(x_max, s.x.maxCoeff());
    y_min = std::min(y_min, s.y.minCoeff());
    y_max = std::max(y_max, s.y.maxCoeff());
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) {
    y_max += 0.5;
    y_min -= 0.5;
  }
  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double v) {
    return kMarginLeft + (v - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double v) {
    return kMarginTop + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h;
  };

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_line_svg: cannot write '" + path.string() +
                             "'");
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";

  // Axes.
  const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\""
      << fmt(x1) << "\" y2=\"" << fmt(y0)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\""
      << fmt(x0) << "\" y2=\"" << fmt(y1)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // Ticks: 5 per axis.
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 4.0;
    const double fy = y_min + (y_max - y_min) * t / 4.0;
    out << "<line x1=\"" << fmt(sx(fx)) << "\" y1=\"" << fmt(y0) << "\" x2=\""
        << fmt(sx(fx)) << "\" y2=\"" << fmt(y0 + 4)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(sx(fx)) << "\" y=\"" << fmt(y0 + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_tick(fx)
        << "</text>\n";
    out << "<line x1=\"" << fmt(x0 - 4) << "\" y1=\"" << fmt(sy(fy))
        << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(sy(fy))
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(sy(fy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_tick(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kHeight - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << fmt((y0 + y1) / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << fmt((y0 + y1) / 2) << ")\">" << y_label << "</text>\n";

  // Legend across the top.
  double legend_x = kMarginLeft;
  for (const SvgSeries& s : series) {
    out << "<line x1=\"" << fmt(legend_x) << "\" y1=\"16\" x2=\""
        << fmt(legend_x + 22) << "\" y2=\"16\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(legend_x + 27)
        << "\" y=\"20\" font-size=\"12\">" << s.label << "</text>\n";
    legend_x += 40.0 + 7.0 * static_cast<double>(s.label.size());
  }

  // Data: one polyline per series.
  for (const SvgSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (Index i = 0; i < s.x.size(); ++i) {
      if (i > 0) out << ' ';
      out << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i]));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace pdfool
