#ifndef BTD_TESTS_SUPPORT_HPP
#define BTD_TESTS_SUPPORT_HPP

#include <random>

#include "btd/volume.hpp"

namespace btdtest {

// Fill a NormalizedVolume from a per-voxel function (may return the
// excluded sentinel).
template <typename Fn>
btd::NormalizedVolume make_normalized(int nx, int ny, int nz, Fn fn) {
    btd::NormalizedVolume v;
    v.nx = nx;
    v.ny = ny;
    v.nz = nz;
    v.data.resize(static_cast<std::size_t>(nx) * ny * nz);
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) v.at(x, y, z) = fn(x, y, z);
    return v;
}

// Random normalized volume: grays uniform in [0,1], a fraction of voxels
// excluded.
inline btd::NormalizedVolume random_normalized(std::mt19937_64& rng, int nx, int ny,
                                               int nz, double excluded_frac = 0.3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return make_normalized(nx, ny, nz, [&](int, int, int) {
        if (u(rng) < excluded_frac) return btd::kExcludedGray;
        return static_cast<float>(u(rng));
    });
}

inline btd::Volume3 random_volume(std::mt19937_64& rng, int nx, int ny, int nz,
                                  double zero_frac = 0.2, float hi = 100.0f) {
    std::uniform_real_distribution<float> u(0.0f, hi);
    std::uniform_real_distribution<double> z(0.0, 1.0);
    btd::Volume3 v(nx, ny, nz);
    for (auto& s : v.data) s = z(rng) < zero_frac ? 0.0f : u(rng);
    return v;
}

}  // namespace btdtest

#endif
