#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pdfool/types.hpp"

namespace pdfool {

struct SvgSeries {
  std::string label;
  std::string color;
  Vector x;
  Vector y;
};

/// Minimal static line chart: axes and ticks drawn as line/text elements, one
/// polyline per series, legend in the top margin.
void write_line_svg(const std::vector<SvgSeries>& series,
                    const std::string& x_label, const std::string& y_label,
                    const std::filesystem::path& path);

}  // namespace pdfool
