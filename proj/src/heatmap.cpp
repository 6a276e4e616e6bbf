#include "btd/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace btd {

void render_heatmap(const Histogram2D& h, const std::string& path, bool log_scale) {
    auto map = [log_scale](double v) { return log_scale ? std::log1p(v) : v; };
    double vmax = 0.0;
    for (double c : h.counts) vmax = std::max(vmax, map(c));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError(path + ": cannot open for writing");
    f << "P5\n" << h.bins << " " << h.n_slices << "\n255\n";
    std::vector<std::uint8_t> row(h.bins);
    for (int j = 0; j < h.n_slices; ++j) {
        for (int i = 0; i < h.bins; ++i) {
            const double v = vmax > 0.0 ? map(h.at(i, j)) / vmax : 0.0;
            row[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
        f.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!f) throw ParseError(path + ": write failed");
}

}  // namespace btd
