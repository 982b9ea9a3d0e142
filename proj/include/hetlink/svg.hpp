#pragma once

#include <string>

#include "hetlink/metrics.hpp"

namespace hetlink {

// Self-contained SVG heatmap: true classes as rows, predictions as columns,
// log-scaled white-to-red ramp, axis labels and per-cell counts.
std::string confusion_heatmap_svg(const ConfusionMatrix& cm);

}  // namespace hetlink
