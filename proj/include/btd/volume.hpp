#ifndef BTD_VOLUME_HPP
#define BTD_VOLUME_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "btd/errors.hpp"

namespace btd {

// Anatomical role of a grid axis: left-right, anterior-posterior,
// superior-inferior.  Slicing a volume along the SI axis yields the axial
// series, along AP the coronal series, along LR the sagittal series.
enum class AxisRole : int { LR = 0, AP = 1, SI = 2 };

const char* axis_role_name(AxisRole r);

// Bijection between the three grid axes (x=0, y=1, z=2) and axis roles.
struct AxisRoles {
    std::array<AxisRole, 3> role{AxisRole::LR, AxisRole::AP, AxisRole::SI};

    int axis_of(AxisRole r) const {
        for (int a = 0; a < 3; ++a)
            if (role[a] == r) return a;
        throw InvalidArgument("axis role not mapped");
    }
    bool valid() const {
        bool seen[3] = {false, false, false};
        for (int a = 0; a < 3; ++a) seen[static_cast<int>(role[a])] = true;
        return seen[0] && seen[1] && seen[2];
    }
    bool operator==(const AxisRoles&) const = default;
};

// Dense 3D scalar grid.  x is the fastest-varying index:
// data[x + nx*(y + ny*z)].  `origin` is the voxel offset of this grid
// inside its parent grid, (0,0,0) for a freshly loaded scan.
struct Volume3 {
    int nx = 0, ny = 0, nz = 0;
    std::vector<float> data;
    AxisRoles roles;
    std::array<int, 3> origin{0, 0, 0};

    Volume3() = default;
    Volume3(int nx_, int ny_, int nz_, float fill = 0.0f)
        : nx(nx_), ny(ny_), nz(nz_),
          data(static_cast<std::size_t>(nx_) * ny_ * nz_, fill) {}

    std::size_t size() const { return data.size(); }
    std::array<int, 3> dims() const { return {nx, ny, nz}; }
    int dim(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * z);
    }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
};

// Boolean support of the brain (nonzero voxels of a skull-stripped scan).
struct BrainMask {
    int nx = 0, ny = 0, nz = 0;
    std::vector<std::uint8_t> data;
    std::size_t voxel_count = 0;

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * z);
    }
    bool at(int x, int y, int z) const { return data[index(x, y, z)] != 0; }
};

// Sentinel stored for voxels excluded from the normalized gray scale
// (outside the brain mask or below the brain mean).
inline constexpr float kExcludedGray = -1.0f;

// Mean-anchored normalized volume: included voxels carry grays in [0,1]
// with 0 at the brain mean and 1 at the brain maximum.
struct NormalizedVolume {
    int nx = 0, ny = 0, nz = 0;
    std::vector<float> data;
    AxisRoles roles;
    std::array<int, 3> origin{0, 0, 0};
    double mu_brain = 0.0;  // source-scale mean over the brain mask
    double v_max = 0.0;     // source-scale normalization ceiling

    std::size_t size() const { return data.size(); }
    std::array<int, 3> dims() const { return {nx, ny, nz}; }
    int dim(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * z);
    }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    bool included(int x, int y, int z) const { return at(x, y, z) >= 0.0f; }
};

// 3x3x3-style box-mean low-pass (replicate edge padding) followed by
// in-plane decimation of the LR and AP axes by ds_factor.  The SI axis
// keeps its length.  lp_radius is the odd kernel edge.
Volume3 preprocess(const Volume3& vol, int lp_radius = 3, int ds_factor = 2);

// Nonzero support of the volume.
BrainMask brain_region(const Volume3& vol);

// Mean-anchored gray normalization over the brain mask.
NormalizedVolume normalize_gray(const Volume3& vol, const BrainMask& mask);

// Split at the LR midplane; for odd LR length the center plane is dropped
// from both halves.  Halves carry correct origins.
std::pair<NormalizedVolume, NormalizedVolume> split_halves(const NormalizedVolume& vol);

// Inclusive-range crop along the axis with the given role.  Works on any
// grid type with nx/ny/nz, data, roles and origin members.
template <typename GridT>
GridT crop_axis(const GridT& v, AxisRole role, int lo, int hi) {
    const int axis = v.roles.axis_of(role);
    const int len = axis == 0 ? v.nx : (axis == 1 ? v.ny : v.nz);
    if (lo < 0 || hi >= len || lo > hi)
        throw InvalidArgument("crop_axis: range [" + std::to_string(lo) + "," +
                              std::to_string(hi) + "] invalid for axis length " +
                              std::to_string(len));
    GridT out = v;
    int keep = hi - lo + 1;
    int onx = axis == 0 ? keep : v.nx;
    int ony = axis == 1 ? keep : v.ny;
    int onz = axis == 2 ? keep : v.nz;
    out.nx = onx;
    out.ny = ony;
    out.nz = onz;
    out.data.assign(static_cast<std::size_t>(onx) * ony * onz, {});
    out.origin = v.origin;
    out.origin[axis] += lo;
    const int x0 = axis == 0 ? lo : 0;
    const int y0 = axis == 1 ? lo : 0;
    const int z0 = axis == 2 ? lo : 0;
    for (int z = 0; z < onz; ++z)
        for (int y = 0; y < ony; ++y) {
            const auto src = v.index(x0, y0 + y, z0 + z);
            const auto dst = out.index(0, y, z);
            for (int x = 0; x < onx; ++x) out.data[dst + x] = v.data[src + x];
        }
    if constexpr (requires { out.positive_count; }) {
        std::size_t n = 0;
        for (auto v8 : out.data) n += (v8 != 0);
        out.positive_count = n;
    }
    return out;
}

}  // namespace btd

#endif
