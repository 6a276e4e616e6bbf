#include "btd/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

namespace btd {

std::uint64_t phantom_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t c, std::uint64_t salt) {
    std::uint64_t x = seed;
    x ^= a * 0x9E3779B97F4A7C15ull;
    x ^= b * 0xBF58476D1CE4E5B9ull;
    x ^= c * 0x94D049BB133111EBull;
    x ^= salt * 0xD6E8FEB86659FD93ull;
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    x = x ^ (x >> 31);
    return x;
}

double phantom_u01(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void PhantomSpec::validate() const {
    if (dims[0] < 8 || dims[1] < 8 || dims[2] < 8)
        throw InvalidArgument("PhantomSpec: dims too small");
    for (double s : brain_semi)
        if (!(s > 0.0)) throw InvalidArgument("PhantomSpec: brain semi-axes must be > 0");
    if (!(base_lo > 0.0 && base_lo < base_hi))
        throw InvalidArgument("PhantomSpec: need 0 < base_lo < base_hi");
    if (noise_amp < 0.0) throw InvalidArgument("PhantomSpec: noise_amp must be >= 0");
    if (!has_tumor()) return;

    if (!(tumor_lo < tumor_hi))
        throw InvalidArgument("PhantomSpec: need tumor_lo < tumor_hi");
    if (!((tumor_lo + tumor_hi) / 2.0 > (base_lo + base_hi) / 2.0))
        throw InvalidArgument("PhantomSpec: tumor band midpoint must exceed base band midpoint");

    // Conservative ellipsoid-in-ellipsoid containment check.
    const double bc[3] = {(dims[0] - 1) / 2.0, (dims[1] - 1) / 2.0, (dims[2] - 1) / 2.0};
    double rho = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double t = (std::fabs(tumor_center[k] - bc[k]) + tumor_semi[k]) / brain_semi[k];
        rho += t * t;
    }
    if (rho > 1.0)
        throw InvalidArgument("PhantomSpec: tumor ellipsoid not inside brain ellipsoid");

    const double frac = (tumor_semi[0] * tumor_semi[1] * tumor_semi[2]) /
                        (brain_semi[0] * brain_semi[1] * brain_semi[2]);
    if (frac > 0.15)
        throw InvalidArgument("PhantomSpec: tumor volume fraction exceeds 0.15");
}

namespace {

// One separable box pass with replicate padding; symmetric pair
// accumulation keeps a mirrored line bitwise mirrored.
void box_pass_d(const std::vector<double>& in, std::vector<double>& out,
                const int n[3], int axis, int radius) {
    const std::size_t stride[3] = {1, static_cast<std::size_t>(n[0]),
                                   static_cast<std::size_t>(n[0]) * n[1]};
    const double inv = 1.0 / (2 * radius + 1);
    for (int z = 0; z < n[2]; ++z)
        for (int y = 0; y < n[1]; ++y)
            for (int x = 0; x < n[0]; ++x) {
                const int c[3] = {x, y, z};
                const std::size_t base = x * stride[0] + y * stride[1] + z * stride[2];
                double s = in[base];
                for (int k = 1; k <= radius; ++k) {
                    const int lo = std::max(c[axis] - k, 0);
                    const int hi = std::min(c[axis] + k, n[axis] - 1);
                    const auto st = static_cast<std::ptrdiff_t>(stride[axis]);
                    s += in[base + st * (lo - c[axis])] + in[base + st * (hi - c[axis])];
                }
                out[base] = s * inv;
            }
}

}  // namespace

PhantomCase generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    const int nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
    const int n[3] = {nx, ny, nz};
    const double bc[3] = {(nx - 1) / 2.0, (ny - 1) / 2.0, (nz - 1) / 2.0};
    const std::size_t total = static_cast<std::size_t>(nx) * ny * nz;

    // Mirrored white noise: key the hash on the LR-folded coordinate.
    std::vector<double> tex(total);
    std::size_t idx = 0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x, ++idx) {
                const int xm = std::min(x, nx - 1 - x);
                tex[idx] = phantom_u01(phantom_hash(spec.seed, xm, y, z, 1));
            }

    // Two 5-tap box smooths per axis give a tissue-like texture.
    std::vector<double> tmp(total);
    for (int pass = 0; pass < 2; ++pass) {
        box_pass_d(tex, tmp, n, 0, 2);
        box_pass_d(tmp, tex, n, 1, 2);
        box_pass_d(tex, tmp, n, 2, 2);
        std::swap(tex, tmp);
    }

    auto inside = [](double x, double y, double z, const double c[3],
                     const std::array<double, 3>& semi) {
        const double dx = (x - c[0]) / semi[0];
        const double dy = (y - c[1]) / semi[1];
        const double dz = (z - c[2]) / semi[2];
        return dx * dx + dy * dy + dz * dz <= 1.0;
    };
    const double tc[3] = {spec.tumor_center[0], spec.tumor_center[1],
                          spec.tumor_center[2]};

    // Texture statistics over the brain.  The smoothed noise is roughly
    // Gaussian; pushing it through its own CDF spreads the base grays
    // almost uniformly over the band, so no gray bin of normal tissue is
    // rare.  A min-max mapping would leave thin distribution tails whose
    // bins look as rare as tumor grays.
    double tsum = 0.0, tsq = 0.0;
    std::size_t tcount = 0;
    idx = 0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x, ++idx)
                if (inside(x, y, z, bc, spec.brain_semi)) {
                    tsum += tex[idx];
                    tsq += tex[idx] * tex[idx];
                    ++tcount;
                }
    const double tmu = tcount ? tsum / tcount : 0.5;
    const double tvar = tcount ? std::max(tsq / tcount - tmu * tmu, 1e-12) : 1.0;
    const double tsd = std::sqrt(tvar);
    auto flatten = [&](double t) {
        return 0.5 * (1.0 + std::erf((t - tmu) / (tsd * std::numbers::sqrt2)));
    };

    PhantomCase out;
    out.vol = Volume3(nx, ny, nz);
    out.truth = BinaryMask3(nx, ny, nz);

    idx = 0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x, ++idx) {
                if (!inside(x, y, z, bc, spec.brain_semi)) continue;
                double v;
                if (spec.has_tumor() && inside(x, y, z, tc, spec.tumor_semi)) {
                    v = spec.tumor_lo +
                        (spec.tumor_hi - spec.tumor_lo) *
                            phantom_u01(phantom_hash(spec.seed, x, y, z, 2));
                    out.truth.data[idx] = 1;
                } else {
                    v = spec.base_lo +
                        (spec.base_hi - spec.base_lo) * flatten(tex[idx]);
                    if (spec.noise_amp > 0.0)
                        v += spec.noise_amp *
                             (phantom_u01(phantom_hash(spec.seed, x, y, z, 3)) - 0.5);
                }
                out.vol.data[idx] = static_cast<float>(std::max(v, 1e-3));
            }
    out.truth.recount();
    return out;
}

Volume3 mirror_volume(const Volume3& vol) {
    const int axis = vol.roles.axis_of(AxisRole::LR);
    Volume3 out = vol;
    const int len = vol.dim(axis);
    for (int z = 0; z < vol.nz; ++z)
        for (int y = 0; y < vol.ny; ++y)
            for (int x = 0; x < vol.nx; ++x) {
                int m[3] = {x, y, z};
                m[axis] = len - 1 - m[axis];
                out.at(m[0], m[1], m[2]) = vol.at(x, y, z);
            }
    return out;
}

PhantomSpec standard_phantom_spec(std::uint64_t seed) {
    PhantomSpec s;
    s.seed = seed;
    const double bc[3] = {(s.dims[0] - 1) / 2.0, (s.dims[1] - 1) / 2.0,
                          (s.dims[2] - 1) / 2.0};
    auto draw = [seed](std::uint64_t salt) {
        return phantom_u01(phantom_hash(seed, 0, 0, 0, 100 + salt));
    };
    for (int k = 0; k < 3; ++k) s.tumor_semi[k] = 7.0 + 4.0 * draw(k);
    s.base_hi = 0.70;   // broad base band; its top overlaps the tumor rim
    s.tumor_lo = 0.60;
    s.tumor_hi = 0.90;
    s.noise_amp = 0.02;

    const double side = draw(3) < 0.5 ? -1.0 : 1.0;
    const double dx_lo = s.tumor_semi[0] + 3.0;
    const double dx_hi = 16.0;
    s.tumor_center[0] = bc[0] + side * (dx_lo + (dx_hi - dx_lo) * draw(4));
    s.tumor_center[1] = bc[1] + (draw(5) * 2.0 - 1.0) * 6.0;
    s.tumor_center[2] = bc[2] + (draw(6) * 2.0 - 1.0) * 4.0;
    return s;
}

}  // namespace btd
