#ifndef BTD_DETECTION_HPP
#define BTD_DETECTION_HPP

#include "btd/histogram.hpp"

namespace btd {

// Binary 3D mask with grid bookkeeping matching the volume types.
struct BinaryMask3 {
    int nx = 0, ny = 0, nz = 0;
    std::vector<std::uint8_t> data;
    AxisRoles roles;
    std::array<int, 3> origin{0, 0, 0};
    std::size_t positive_count = 0;

    BinaryMask3() = default;
    BinaryMask3(int nx_, int ny_, int nz_)
        : nx(nx_), ny(ny_), nz(nz_),
          data(static_cast<std::size_t>(nx_) * ny_ * nz_, 0) {}

    std::size_t size() const { return data.size(); }
    std::array<int, 3> dims() const { return {nx, ny, nz}; }
    int dim(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * z);
    }
    bool at(int x, int y, int z) const { return data[index(x, y, z)] != 0; }
    void set(int x, int y, int z, bool v) { data[index(x, y, z)] = v ? 1 : 0; }
    void recount() {
        positive_count = 0;
        for (auto v : data) positive_count += (v != 0);
    }
};

struct DetectionParams {
    double cdf_fraction = 0.20;
    int morph_kernel_edge = 5;
    double morph_floor = 0.5;

    void validate() const;
};

// Lower edge of the first bin whose CDF value reaches `fraction`.
double threshold_from_cdf(const CDFCurve& cdf, double fraction);

// Voxel is positive iff included and its normalized gray >= threshold.
BinaryMask3 binarize(const NormalizedVolume& bbox_vol, double threshold);

// Mean-filter the 0/1 grid (zero padding) and keep voxels whose local
// mean exceeds the floor.
BinaryMask3 morph_smooth(const BinaryMask3& m, const DetectionParams& p);

// Nearest-neighbor in-plane upsample by ds_factor and placement at the
// (scaled) origin inside a full-resolution grid of `original_dims`.
BinaryMask3 embed_mask(const BinaryMask3& m, std::array<int, 3> original_dims,
                       int ds_factor);

// In-plane decimation of a full-resolution mask onto the working grid,
// phase-matched to preprocess().
BinaryMask3 downsample_mask(const BinaryMask3& full, int ds_factor);

// Mask from a 0/1-valued volume (e.g. a loaded truth file).
BinaryMask3 mask_from_volume(const Volume3& vol, float threshold = 0.5f);

}  // namespace btd

#endif
