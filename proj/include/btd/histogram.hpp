#ifndef BTD_HISTOGRAM_HPP
#define BTD_HISTOGRAM_HPP

#include <vector>

#include "btd/volume.hpp"

namespace btd {

// Gray-bin x slice-index count matrix for one slice series.  Counts are
// reals: raw histograms are integral, modulated ones are not.
struct Histogram2D {
    int bins = 0;
    int n_slices = 0;
    AxisRole axis_role = AxisRole::SI;
    std::vector<double> counts;     // bins * n_slices, bin-major per slice
    std::vector<double> bin_edges;  // bins + 1 values spanning [0, 1]

    double& at(int bin, int slice) { return counts[bin + static_cast<std::size_t>(bins) * slice]; }
    double at(int bin, int slice) const { return counts[bin + static_cast<std::size_t>(bins) * slice]; }
    double total() const;
};

struct Histogram1D {
    int bins = 0;
    std::vector<double> counts;
    std::vector<double> bin_edges;

    double total() const;
};

// Per-slice mass of a 2D histogram (locational distribution).
struct LocationalProfile {
    std::vector<double> values;
    int n_slices() const { return static_cast<int>(values.size()); }
};

struct CDFCurve {
    std::vector<double> values;  // non-decreasing, terminal 1
    std::vector<double> bin_edges;
    int bins() const { return static_cast<int>(values.size()); }
};

// Uniform bin edges over [0,1]: edge k = k / bins.
std::vector<double> uniform_edges(int bins);

// Bin index for a normalized gray in [0,1]: half-open bins with the last
// bin closed at 1.
int bin_of(double gray, int bins);

// 2D histogram of the non-excluded voxels, sliced along the axis with the
// given role.  If `restrict_to` is given (same dims as vol), only voxels
// where it is true are counted; this is how truth histograms are built.
Histogram2D histogram2d(const NormalizedVolume& vol, AxisRole axis_role, int bins,
                        const std::vector<std::uint8_t>* restrict_to = nullptr);

Histogram1D collapse_gray(const Histogram2D& h);
LocationalProfile collapse_slice(const Histogram2D& h);

// Unsigned elementwise difference |left - right| of two half histograms.
Histogram2D asymmetry_map(const Histogram2D& h_left, const Histogram2D& h_right);

// Prefix-sum CDF of a 1D histogram, normalized to terminal value 1.
CDFCurve cdf_from_h1d(const Histogram1D& h);

}  // namespace btd

#endif
