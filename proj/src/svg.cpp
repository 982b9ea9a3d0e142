#include "hetlink/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hetlink {

namespace {

// log-scaled heat in [0,1] -> white (247) to dark red; every channel is
// monotone in the heat value so color order matches count order
std::string heat_color(double v) {
  const int r = static_cast<int>(std::lround(247.0 - v * (247.0 - 165.0)));
  const int g = static_cast<int>(std::lround(247.0 - v * (247.0 - 15.0)));
  const int b = static_cast<int>(std::lround(247.0 - v * (247.0 - 21.0)));
  std::ostringstream c;
  c << "rgb(" << r << "," << g << "," << b << ")";
  return c.str();
}

}  // namespace

std::string confusion_heatmap_svg(const ConfusionMatrix& cm) {
  const size_t n = cm.classes;
  const int cell = 34;
  const int left = 70, top = 60, right = 20, bottom = 20;
  const int width = left + static_cast<int>(n) * cell + right;
  const int height = top + static_cast<int>(n) * cell + bottom;

  int64_t max_count = 0;
  for (int64_t c : cm.counts) max_count = std::max(max_count, c);
  const double scale =
      max_count > 0 ? 1.0 / std::log1p(static_cast<double>(max_count)) : 0.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<style>text{font-family:sans-serif;font-size:11px;}</style>\n";
  out << "<text x=\"" << left + static_cast<int>(n) * cell / 2
      << "\" y=\"16\" text-anchor=\"middle\">predicted class</text>\n";
  out << "<text x=\"14\" y=\"" << top + static_cast<int>(n) * cell / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << top + static_cast<int>(n) * cell / 2 << ")\">true class</text>\n";

  for (size_t j = 0; j < n; ++j) {
    out << "<text x=\"" << left + static_cast<int>(j) * cell + cell / 2 << "\" y=\""
        << top - 8 << "\" text-anchor=\"middle\">" << j << "</text>\n";
  }
  for (size_t i = 0; i < n; ++i) {
    out << "<text x=\"" << left - 8 << "\" y=\""
        << top + static_cast<int>(i) * cell + cell / 2 + 4
        << "\" text-anchor=\"end\">" << i << "</text>\n";
  }

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const int64_t c = cm.at(i, j);
      const double v = c > 0 ? std::log1p(static_cast<double>(c)) * scale : 0.0;
      const int x = left + static_cast<int>(j) * cell;
      const int y = top + static_cast<int>(i) * cell;
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << heat_color(v)
          << "\" stroke=\"#999\" stroke-width=\"0.5\" data-count=\"" << c
          << "\"/>\n";
      out << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
          << "\" text-anchor=\"middle\" fill=\"" << (v > 0.6 ? "#fff" : "#333")
          << "\">" << c << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hetlink
