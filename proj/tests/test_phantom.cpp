#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "btd/histogram.hpp"
#include "btd/phantom.hpp"

using namespace btd;

TEST_CASE("identical specs generate bit-identical phantoms") {
    const PhantomSpec spec = standard_phantom_spec(42);
    const PhantomCase a = generate_phantom(spec);
    const PhantomCase b = generate_phantom(spec);
    CHECK(a.vol.data == b.vol.data);
    CHECK(a.truth.data == b.truth.data);
    CHECK(a.truth.positive_count == b.truth.positive_count);
    // A different seed actually changes the data.
    PhantomSpec other = spec;
    other.seed = 43;
    CHECK(generate_phantom(other).vol.data != a.vol.data);
}

TEST_CASE("zero-noise tumor-free phantoms are exactly LR mirror symmetric") {
    PhantomSpec spec;
    spec.seed = 9;
    spec.noise_amp = 0.0;
    const PhantomCase pc = generate_phantom(spec);
    CHECK(pc.truth.positive_count == 0);
    const Volume3 m = mirror_volume(pc.vol);
    CHECK(m.data == pc.vol.data);
}

TEST_CASE("truth voxel count approximates the ellipsoid volume") {
    PhantomSpec spec;
    spec.seed = 5;
    spec.tumor_semi = {9.0, 8.0, 7.0};
    spec.tumor_center = {30.0, 47.5, 33.5};
    const PhantomCase pc = generate_phantom(spec);
    const double analytic = 4.0 / 3.0 * std::numbers::pi * 9.0 * 8.0 * 7.0;
    CHECK(static_cast<double>(pc.truth.positive_count) >= 0.95 * analytic);
    CHECK(static_cast<double>(pc.truth.positive_count) <= 1.05 * analytic);
}

TEST_CASE("mirror_volume is an involution and fixes symmetric phantoms") {
    PhantomSpec spec;
    spec.seed = 14;
    const PhantomCase pc = generate_phantom(spec);  // noise on, no tumor
    const Volume3 m1 = mirror_volume(pc.vol);
    const Volume3 m2 = mirror_volume(m1);
    CHECK(m2.data == pc.vol.data);

    PhantomSpec sym = spec;
    sym.noise_amp = 0.0;
    const PhantomCase sc = generate_phantom(sym);
    CHECK(mirror_volume(sc.vol).data == sc.vol.data);
}

TEST_CASE("asymmetry of a mirrored pair of halves is the zero map") {
    PhantomSpec spec;
    spec.seed = 23;
    spec.noise_amp = 0.0;
    const PhantomCase pc = generate_phantom(spec);
    const BrainMask mask = brain_region(pc.vol);
    const NormalizedVolume norm = normalize_gray(pc.vol, mask);
    const auto [l, r] = split_halves(norm);
    for (AxisRole role : {AxisRole::SI, AxisRole::AP}) {
        const Histogram2D hl = histogram2d(l, role, 64);
        const Histogram2D hr = histogram2d(r, role, 64);
        CHECK(asymmetry_map(hl, hr).total() == 0.0);
    }
}

TEST_CASE("invalid specs are rejected") {
    PhantomSpec s;
    s.tumor_semi = {30.0, 30.0, 20.0};  // too big a volume fraction
    s.tumor_center = {47.5, 47.5, 33.5};
    CHECK_THROWS_AS(s.validate(), InvalidArgument);

    s = {};
    s.tumor_semi = {5.0, 5.0, 5.0};
    s.tumor_center = {2.0, 2.0, 2.0};  // pokes out of the brain ellipsoid
    CHECK_THROWS_AS(s.validate(), InvalidArgument);

    s = {};
    s.tumor_semi = {5.0, 5.0, 5.0};
    s.tumor_center = {60.0, 47.5, 33.5};
    s.tumor_lo = 0.10;  // band midpoint below the base band midpoint
    s.tumor_hi = 0.20;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);

    s = {};
    s.base_lo = 0.7;  // inverted base band
    s.base_hi = 0.3;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("the standard spec family is valid, tumored and off-center") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const PhantomSpec s = standard_phantom_spec(seed);
        CHECK_NOTHROW(s.validate());
        CHECK(s.has_tumor());
        const PhantomCase pc = generate_phantom(s);
        CHECK(pc.truth.positive_count > 0);
        // Tumor strictly inside the brain support.
        const BrainMask brain = brain_region(pc.vol);
        for (std::size_t i = 0; i < pc.truth.size(); ++i)
            if (pc.truth.data[i]) CHECK(brain.data[i] != 0);
        // Off the midline: entirely inside one half.
        const double mid = (s.dims[0] - 1) / 2.0;
        bool crosses = false;
        for (int z = 0; z < pc.truth.nz && !crosses; ++z)
            for (int y = 0; y < pc.truth.ny && !crosses; ++y) {
                bool l = false, r = false;
                for (int x = 0; x < pc.truth.nx; ++x)
                    if (pc.truth.at(x, y, z)) (x < mid ? l : r) = true;
                crosses = l && r;
            }
        CHECK(!crosses);
    }
}

TEST_CASE("hash-based generator basics") {
    // Deterministic, salt-sensitive, and u01 lands in [0, 1).
    CHECK(phantom_hash(1, 2, 3, 4, 5) == phantom_hash(1, 2, 3, 4, 5));
    CHECK(phantom_hash(1, 2, 3, 4, 5) != phantom_hash(1, 2, 3, 4, 6));
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const double u = phantom_u01(phantom_hash(7, k, k * 3, k * 7, 0));
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
