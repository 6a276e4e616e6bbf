#ifndef BTD_HEATMAP_HPP
#define BTD_HEATMAP_HPP

#include <string>

#include "btd/histogram.hpp"

namespace btd {

// Grayscale PGM (P5) image of a 2D histogram: width = bins, height =
// n_slices, max count mapped to 255 (log1p mapping when log_scale).
void render_heatmap(const Histogram2D& h, const std::string& path, bool log_scale);

}  // namespace btd

#endif
