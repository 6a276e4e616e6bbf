#include "btd/detection.hpp"

#include <algorithm>
#include <cmath>

namespace btd {

void DetectionParams::validate() const {
    if (!(cdf_fraction > 0.0 && cdf_fraction < 1.0))
        throw InvalidArgument("DetectionParams: cdf_fraction must be in (0, 1)");
    if (morph_kernel_edge < 3 || morph_kernel_edge % 2 == 0)
        throw InvalidArgument("DetectionParams: morph_kernel_edge must be odd >= 3");
    if (!(morph_floor > 0.0 && morph_floor < 1.0))
        throw InvalidArgument("DetectionParams: morph_floor must be in (0, 1)");
}

double threshold_from_cdf(const CDFCurve& cdf, double fraction) {
    for (int i = 0; i < cdf.bins(); ++i)
        if (cdf.values[i] >= fraction) return cdf.bin_edges[i];
    // Terminal value 1 makes this unreachable for fraction <= 1.
    return cdf.bin_edges[cdf.bins() - 1];
}

BinaryMask3 binarize(const NormalizedVolume& bbox_vol, double threshold) {
    BinaryMask3 m(bbox_vol.nx, bbox_vol.ny, bbox_vol.nz);
    m.roles = bbox_vol.roles;
    m.origin = bbox_vol.origin;
    for (std::size_t i = 0; i < bbox_vol.size(); ++i) {
        const float g = bbox_vol.data[i];
        m.data[i] = (g >= 0.0f && g >= threshold) ? 1 : 0;
    }
    m.recount();
    return m;
}

BinaryMask3 morph_smooth(const BinaryMask3& m, const DetectionParams& p) {
    p.validate();
    const int r = (p.morph_kernel_edge - 1) / 2;
    const double inv = 1.0 / (static_cast<double>(p.morph_kernel_edge) *
                              p.morph_kernel_edge * p.morph_kernel_edge);

    // Separable sum with zero padding, one pass per axis.
    std::vector<double> a(m.data.begin(), m.data.end());
    std::vector<double> b(a.size());
    const int n[3] = {m.nx, m.ny, m.nz};
    const std::size_t stride[3] = {1, static_cast<std::size_t>(m.nx),
                                   static_cast<std::size_t>(m.nx) * m.ny};
    for (int axis = 0; axis < 3; ++axis) {
        for (int z = 0; z < m.nz; ++z)
            for (int y = 0; y < m.ny; ++y)
                for (int x = 0; x < m.nx; ++x) {
                    const int c[3] = {x, y, z};
                    const std::size_t base = m.index(x, y, z);
                    double s = a[base];
                    for (int k = 1; k <= r; ++k) {
                        if (c[axis] - k >= 0) s += a[base - k * stride[axis]];
                        if (c[axis] + k < n[axis]) s += a[base + k * stride[axis]];
                    }
                    b[base] = s;
                }
        std::swap(a, b);
    }

    BinaryMask3 out(m.nx, m.ny, m.nz);
    out.roles = m.roles;
    out.origin = m.origin;
    for (std::size_t i = 0; i < a.size(); ++i)
        out.data[i] = a[i] * inv > p.morph_floor ? 1 : 0;
    out.recount();
    return out;
}

BinaryMask3 embed_mask(const BinaryMask3& m, std::array<int, 3> original_dims,
                       int ds_factor) {
    if (ds_factor < 1) throw InvalidArgument("embed_mask: ds_factor must be >= 1");
    const int ax_lr = m.roles.axis_of(AxisRole::LR);
    const int ax_ap = m.roles.axis_of(AxisRole::AP);
    int scale[3] = {1, 1, 1};
    scale[ax_lr] = ds_factor;
    scale[ax_ap] = ds_factor;

    // A decimated grid has ceil(n / ds) samples, so the upsampled block may
    // legitimately overshoot the original grid by up to ds - 1 voxels; that
    // remainder is clipped below.  Anything beyond it is a placement error.
    for (int axis = 0; axis < 3; ++axis) {
        const long end = static_cast<long>(m.origin[axis]) * scale[axis] +
                         static_cast<long>(m.dim(axis)) * scale[axis];
        if (m.origin[axis] < 0 || end > original_dims[axis] + scale[axis] - 1)
            throw InvalidArgument("embed_mask: placement exceeds original dims");
    }

    BinaryMask3 out(original_dims[0], original_dims[1], original_dims[2]);
    out.roles = m.roles;
    for (int z = 0; z < m.nz; ++z)
        for (int y = 0; y < m.ny; ++y)
            for (int x = 0; x < m.nx; ++x) {
                if (!m.at(x, y, z)) continue;
                const int src[3] = {x, y, z};
                for (int dz = 0; dz < scale[2]; ++dz)
                    for (int dy = 0; dy < scale[1]; ++dy)
                        for (int dx = 0; dx < scale[0]; ++dx) {
                            const int tx = (m.origin[0] + src[0]) * scale[0] + dx;
                            const int ty = (m.origin[1] + src[1]) * scale[1] + dy;
                            const int tz = (m.origin[2] + src[2]) * scale[2] + dz;
                            if (tx >= out.nx || ty >= out.ny || tz >= out.nz)
                                continue;
                            out.set(tx, ty, tz, true);
                        }
            }
    out.recount();
    return out;
}

BinaryMask3 downsample_mask(const BinaryMask3& full, int ds_factor) {
    if (ds_factor < 1)
        throw InvalidArgument("downsample_mask: ds_factor must be >= 1");
    if (ds_factor == 1) return full;
    const int ax_lr = full.roles.axis_of(AxisRole::LR);
    const int ax_ap = full.roles.axis_of(AxisRole::AP);
    int step[3] = {1, 1, 1};
    step[ax_lr] = ds_factor;
    step[ax_ap] = ds_factor;
    auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
    BinaryMask3 out(ceil_div(full.nx, step[0]), ceil_div(full.ny, step[1]),
                    ceil_div(full.nz, step[2]));
    out.roles = full.roles;
    for (int z = 0; z < out.nz; ++z)
        for (int y = 0; y < out.ny; ++y)
            for (int x = 0; x < out.nx; ++x)
                out.set(x, y, z, full.at(x * step[0], y * step[1], z * step[2]));
    out.recount();
    return out;
}

BinaryMask3 mask_from_volume(const Volume3& vol, float threshold) {
    BinaryMask3 m(vol.nx, vol.ny, vol.nz);
    m.roles = vol.roles;
    m.origin = vol.origin;
    for (std::size_t i = 0; i < vol.size(); ++i)
        m.data[i] = vol.data[i] > threshold ? 1 : 0;
    m.recount();
    return m;
}

}  // namespace btd
