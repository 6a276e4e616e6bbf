#include "btd/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace btd {

double Histogram2D::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

double Histogram1D::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

std::vector<double> uniform_edges(int bins) {
    std::vector<double> e(bins + 1);
    for (int k = 0; k <= bins; ++k) e[k] = static_cast<double>(k) / bins;
    return e;
}

int bin_of(double gray, int bins) {
    int b = static_cast<int>(std::floor(gray * bins));
    return std::clamp(b, 0, bins - 1);
}

Histogram2D histogram2d(const NormalizedVolume& vol, AxisRole axis_role, int bins,
                        const std::vector<std::uint8_t>* restrict_to) {
    if (bins < 2) throw InvalidArgument("histogram2d: bins must be >= 2");
    if (restrict_to && restrict_to->size() != vol.size())
        throw InvalidArgument("histogram2d: restriction grid size mismatch");

    const int axis = vol.roles.axis_of(axis_role);
    Histogram2D h;
    h.bins = bins;
    h.n_slices = vol.dim(axis);
    h.axis_role = axis_role;
    h.bin_edges = uniform_edges(bins);
    h.counts.assign(static_cast<std::size_t>(bins) * h.n_slices, 0.0);

    // Fixed slice-major accumulation order keeps results bit-deterministic.
    for (int z = 0; z < vol.nz; ++z)
        for (int y = 0; y < vol.ny; ++y)
            for (int x = 0; x < vol.nx; ++x) {
                const std::size_t i = vol.index(x, y, z);
                const float g = vol.data[i];
                if (g < 0.0f) continue;  // excluded
                if (restrict_to && !(*restrict_to)[i]) continue;
                const int slice = axis == 0 ? x : (axis == 1 ? y : z);
                h.at(bin_of(g, bins), slice) += 1.0;
            }
    return h;
}

Histogram1D collapse_gray(const Histogram2D& h) {
    Histogram1D out;
    out.bins = h.bins;
    out.bin_edges = h.bin_edges;
    out.counts.assign(h.bins, 0.0);
    for (int j = 0; j < h.n_slices; ++j)
        for (int i = 0; i < h.bins; ++i) out.counts[i] += h.at(i, j);
    return out;
}

LocationalProfile collapse_slice(const Histogram2D& h) {
    LocationalProfile out;
    out.values.assign(h.n_slices, 0.0);
    for (int j = 0; j < h.n_slices; ++j)
        for (int i = 0; i < h.bins; ++i) out.values[j] += h.at(i, j);
    return out;
}

Histogram2D asymmetry_map(const Histogram2D& h_left, const Histogram2D& h_right) {
    if (h_left.bins != h_right.bins || h_left.n_slices != h_right.n_slices ||
        h_left.axis_role != h_right.axis_role)
        throw InvalidArgument("asymmetry_map: histogram shape mismatch");
    Histogram2D out = h_left;
    for (std::size_t i = 0; i < out.counts.size(); ++i)
        out.counts[i] = std::fabs(h_left.counts[i] - h_right.counts[i]);
    return out;
}

CDFCurve cdf_from_h1d(const Histogram1D& h) {
    const double total = h.total();
    if (!(total > 0.0)) throw DegenerateInput("cdf_from_h1d: zero total mass");
    CDFCurve c;
    c.bin_edges = h.bin_edges;
    c.values.resize(h.bins);
    double run = 0.0;
    for (int i = 0; i < h.bins; ++i) {
        run += h.counts[i];
        c.values[i] = run / total;
    }
    return c;
}

}  // namespace btd
