#include "btd/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace btd {

const char* axis_role_name(AxisRole r) {
    switch (r) {
        case AxisRole::LR: return "LR";
        case AxisRole::AP: return "AP";
        case AxisRole::SI: return "SI";
    }
    return "?";
}

namespace {

// One separable box pass along `axis` with replicate padding.  Taps are
// accumulated in symmetric pairs (in[i-k] + in[i+k]) so a mirrored input
// line produces a bitwise-mirrored output line.
void box_pass(const Volume3& in, Volume3& out, int axis, int radius) {
    const int nx = in.nx, ny = in.ny, nz = in.nz;
    const int len = axis == 0 ? nx : (axis == 1 ? ny : nz);
    const double inv = 1.0 / (2 * radius + 1);
    auto clampi = [len](int i) { return std::clamp(i, 0, len - 1); };
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                int c[3] = {x, y, z};
                double s = in.at(x, y, z);
                for (int k = 1; k <= radius; ++k) {
                    int lo[3] = {c[0], c[1], c[2]};
                    int hi[3] = {c[0], c[1], c[2]};
                    lo[axis] = clampi(c[axis] - k);
                    hi[axis] = clampi(c[axis] + k);
                    s += static_cast<double>(in.at(lo[0], lo[1], lo[2])) +
                         static_cast<double>(in.at(hi[0], hi[1], hi[2]));
                }
                out.at(x, y, z) = static_cast<float>(s * inv);
            }
}

}  // namespace

Volume3 preprocess(const Volume3& vol, int lp_radius, int ds_factor) {
    if (lp_radius < 1 || lp_radius % 2 == 0)
        throw InvalidArgument("preprocess: lp_radius must be odd and >= 1");
    if (ds_factor < 1) throw InvalidArgument("preprocess: ds_factor must be >= 1");
    if (lp_radius > vol.nx || lp_radius > vol.ny || lp_radius > vol.nz)
        throw InvalidArgument("preprocess: kernel larger than a volume dimension");

    const int radius = (lp_radius - 1) / 2;
    Volume3 filt = vol;
    if (radius > 0) {
        Volume3 tmp(vol.nx, vol.ny, vol.nz);
        tmp.roles = vol.roles;
        box_pass(filt, tmp, 0, radius);
        box_pass(tmp, filt, 1, radius);
        box_pass(filt, tmp, 2, radius);
        filt = std::move(tmp);
    }

    if (ds_factor == 1) {
        filt.origin = {0, 0, 0};
        return filt;
    }

    // Decimate the two in-plane axes (LR and AP); the SI length is kept.
    const int ax_lr = vol.roles.axis_of(AxisRole::LR);
    const int ax_ap = vol.roles.axis_of(AxisRole::AP);
    int step[3] = {1, 1, 1};
    step[ax_lr] = ds_factor;
    step[ax_ap] = ds_factor;
    auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
    Volume3 out(ceil_div(vol.nx, step[0]), ceil_div(vol.ny, step[1]),
                ceil_div(vol.nz, step[2]));
    out.roles = vol.roles;
    for (int z = 0; z < out.nz; ++z)
        for (int y = 0; y < out.ny; ++y)
            for (int x = 0; x < out.nx; ++x)
                out.at(x, y, z) = filt.at(x * step[0], y * step[1], z * step[2]);
    return out;
}

BrainMask brain_region(const Volume3& vol) {
    BrainMask m;
    m.nx = vol.nx;
    m.ny = vol.ny;
    m.nz = vol.nz;
    m.data.resize(vol.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < vol.size(); ++i) {
        bool on = vol.data[i] > 0.0f;
        m.data[i] = on ? 1 : 0;
        count += on;
    }
    m.voxel_count = count;
    return m;
}

NormalizedVolume normalize_gray(const Volume3& vol, const BrainMask& mask) {
    if (vol.nx != mask.nx || vol.ny != mask.ny || vol.nz != mask.nz)
        throw InvalidArgument("normalize_gray: mask dims do not match volume");
    if (mask.voxel_count == 0)
        throw DegenerateInput("normalize_gray: empty brain mask");

    double sum = 0.0;
    double vmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vol.size(); ++i) {
        if (!mask.data[i]) continue;
        double v = vol.data[i];
        sum += v;
        vmax = std::max(vmax, v);
    }
    const double mu = sum / static_cast<double>(mask.voxel_count);
    if (!(vmax > mu))
        throw DegenerateInput("normalize_gray: constant brain (v_max == mu_brain)");

    NormalizedVolume out;
    out.nx = vol.nx;
    out.ny = vol.ny;
    out.nz = vol.nz;
    out.roles = vol.roles;
    out.origin = vol.origin;
    out.mu_brain = mu;
    out.v_max = vmax;
    out.data.resize(vol.size());
    const double scale = 1.0 / (vmax - mu);
    for (std::size_t i = 0; i < vol.size(); ++i) {
        double v = vol.data[i];
        if (!mask.data[i] || v < mu)
            out.data[i] = kExcludedGray;
        else
            out.data[i] = static_cast<float>((v - mu) * scale);
    }
    return out;
}

std::pair<NormalizedVolume, NormalizedVolume> split_halves(const NormalizedVolume& vol) {
    const int axis = vol.roles.axis_of(AxisRole::LR);
    const int len = vol.dim(axis);
    if (len < 2) throw InvalidArgument("split_halves: LR length < 2");
    const int half = len / 2;
    NormalizedVolume left = crop_axis(vol, AxisRole::LR, 0, half - 1);
    NormalizedVolume right = crop_axis(vol, AxisRole::LR, len - half, len - 1);
    return {std::move(left), std::move(right)};
}

}  // namespace btd
