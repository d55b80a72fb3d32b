#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relev {

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart: linear axes spanning the data, five ticks per axis,
/// one colour per series and a legend in the top-right corner.
void write_svg(std::ostream& out, const std::string& title, const std::string& x_label,
               const std::string& y_label, const std::vector<LineSeries>& series);

}  // namespace relev
