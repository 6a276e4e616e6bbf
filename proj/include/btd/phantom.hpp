#ifndef BTD_PHANTOM_HPP
#define BTD_PHANTOM_HPP

#include <cstdint>

#include "btd/detection.hpp"

namespace btd {

// Synthetic "brain": ellipsoidal support with mirrored smooth texture,
// small unmirrored noise, and an optional bright ellipsoidal tumor.
struct PhantomSpec {
    std::array<int, 3> dims{96, 96, 68};           // x=LR, y=AP, z=SI
    std::array<double, 3> brain_semi{40.0, 42.0, 28.0};
    double base_lo = 0.15, base_hi = 0.60;         // base intensity band
    double noise_amp = 0.03;                       // unmirrored noise amplitude
    std::array<double, 3> tumor_center{0.0, 0.0, 0.0};  // voxel coordinates
    std::array<double, 3> tumor_semi{0.0, 0.0, 0.0};    // zero => no tumor
    double tumor_lo = 0.62, tumor_hi = 0.92;       // tumor intensity band
    std::uint64_t seed = 0;

    bool has_tumor() const {
        return tumor_semi[0] > 0.0 && tumor_semi[1] > 0.0 && tumor_semi[2] > 0.0;
    }
    void validate() const;
};

struct PhantomCase {
    Volume3 vol;
    BinaryMask3 truth;
};

// Deterministic per-voxel generation: identical spec => bit-identical
// output.  The random source is splitmix64 keyed on (seed, x, y, z, salt).
PhantomCase generate_phantom(const PhantomSpec& spec);

// LR-axis index reversal.
Volume3 mirror_volume(const Volume3& vol);

// The fixed spec family used by the end-to-end test suite: tumor size,
// side and position drawn deterministically from the seed.
PhantomSpec standard_phantom_spec(std::uint64_t seed);

// Counter-based generator: splitmix64 finalizer over a mixed key.
std::uint64_t phantom_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t c, std::uint64_t salt);
double phantom_u01(std::uint64_t h);

}  // namespace btd

#endif
