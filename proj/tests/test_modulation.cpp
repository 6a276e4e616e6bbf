#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "btd/modulation.hpp"

using namespace btd;

namespace {

Histogram2D make_h2(int bins, int slices, std::vector<double> vals) {
    Histogram2D h;
    h.bins = bins;
    h.n_slices = slices;
    h.bin_edges = uniform_edges(bins);
    h.counts = std::move(vals);
    return h;
}

Histogram1D make_h1(std::vector<double> vals) {
    Histogram1D h;
    h.bins = static_cast<int>(vals.size());
    h.bin_edges = uniform_edges(h.bins);
    h.counts = std::move(vals);
    return h;
}

Histogram1D random_h1(std::mt19937_64& rng, int bins) {
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::vector<double> v(bins);
    for (auto& c : v) c = u(rng);
    return make_h1(std::move(v));
}

}  // namespace

TEST_CASE("parameter validation") {
    ModulationParams p;
    CHECK_NOTHROW(p.validate());
    p.min_t = 0.6;  // above max_t
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.gamma = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.smooth_radius = 4;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);

    const ModulationParams f2 = fm2_defaults();
    CHECK(f2.max_t == doctest::Approx(0.56));
    CHECK(f2.min_t == doctest::Approx(0.08));
    CHECK(f2.gamma == doctest::Approx(1.2));
    CHECK(f2.alpha == doctest::Approx(0.20));
    const ModulationParams f1;
    CHECK(f1.max_t == doctest::Approx(0.48));
    CHECK(f1.min_t == doctest::Approx(0.05));
    CHECK(f1.gamma == doctest::Approx(1.8));
    CHECK(f1.alpha == doctest::Approx(0.02));
}

TEST_CASE("identical halves tie to the left side") {
    Histogram2D h = make_h2(4, 2, {1, 2, 3, 4, 5, 6, 7, 8});
    const HalfSelection sel = identify_tumor_free_half(h, h, ModulationParams{});
    CHECK(sel.side == Side::left);
    CHECK(sel.n_left == sel.n_right);
    CHECK(sel.h_tf.counts == collapse_gray(h).counts);
}

TEST_CASE("an extra bright right-half voxel selects the left side") {
    // B=20: bin 18 covers [0.90, 0.95).
    Histogram2D l = make_h2(20, 1, std::vector<double>(20, 0.0));
    Histogram2D r = l;
    r.counts[18] = 1.0;
    const HalfSelection sel = identify_tumor_free_half(l, r, ModulationParams{});
    CHECK(sel.side == Side::left);
    CHECK(sel.n_left == 0.0);
    CHECK(sel.n_right == 1.0);
}

TEST_CASE("left-heavy upper section selects the right side") {
    Histogram2D l = make_h2(20, 1, std::vector<double>(20, 0.0));
    Histogram2D r = l;
    l.counts[15] = 3.0;
    r.counts[15] = 1.0;
    const HalfSelection sel = identify_tumor_free_half(l, r, ModulationParams{});
    CHECK(sel.side == Side::right);
    CHECK(sel.h_tf.counts == collapse_gray(r).counts);
}

TEST_CASE("upper-section boundary: gray 0.55 counts, gray 0.54 does not") {
    // B=20 puts a bin edge exactly at 0.55; bin 11 = [0.55, 0.60),
    // bin 10 = [0.50, 0.55) which contains 0.54.
    Histogram2D l = make_h2(20, 1, std::vector<double>(20, 0.0));
    Histogram2D r = l;
    CHECK(bin_of(0.55, 20) == 11);
    CHECK(bin_of(0.54, 20) == 10);
    r.counts[11] = 1.0;  // one voxel at gray 0.55
    HalfSelection sel = identify_tumor_free_half(l, r, ModulationParams{});
    CHECK(sel.n_right == 1.0);
    r.counts[11] = 0.0;
    r.counts[10] = 1.0;  // one voxel at gray 0.54
    sel = identify_tumor_free_half(l, r, ModulationParams{});
    CHECK(sel.n_right == 0.0);
}

TEST_CASE("truncate_bins peak-normalizes then clamps") {
    // Peak 20 -> normalized {0.9, 1.0, 0.2, 0.05, 0.0}.
    const Histogram1D h = make_h1({18, 20, 4, 1, 0});
    ModulationParams p;  // max_t 0.48, min_t 0.05
    const Histogram1D t = truncate_bins(h, p);
    CHECK(t.counts[0] == doctest::Approx(0.48));   // 0.9 clamps to the ceiling
    CHECK(t.counts[1] == doctest::Approx(0.48));
    CHECK(t.counts[2] == doctest::Approx(0.20));   // in-range value unchanged
    CHECK(t.counts[3] == doctest::Approx(0.05));
    CHECK(t.counts[4] == doctest::Approx(0.05));   // zero lifts to the floor
    CHECK_THROWS_AS(truncate_bins(make_h1({0, 0, 0}), p), DegenerateInput);
}

TEST_CASE("flat input yields the constant-alpha gain curve") {
    const Histogram1D h = make_h1(std::vector<double>(32, 7.0));
    const ModulationFunction f = build_modulation(h, ModulationParams{});
    for (double g : f.gains) CHECK(g == doctest::Approx(0.02));
}

TEST_CASE("two-level input maps the rare band to gain 1 and the common band to alpha") {
    // Wide plateaus so the box smooths cannot reach the plateau centers.
    std::vector<double> v(64, 100.0);
    for (int i = 20; i <= 40; ++i) v[i] = 1.0;
    ModulationParams p;
    const ModulationTrace t = build_modulation_trace(make_h1(std::move(v)), p);
    // Post-smoothing plateau centers hit min_t and max_t exactly.
    CHECK(t.truncated[30] == doctest::Approx(p.min_t));
    CHECK(t.truncated[5] == doctest::Approx(p.max_t));
    for (int i = 26; i <= 34; ++i) CHECK(t.gains[i] == doctest::Approx(1.0).epsilon(1e-9));
    for (int i = 0; i <= 14; ++i) CHECK(t.gains[i] == doctest::Approx(p.alpha).epsilon(1e-9));
    CHECK_THROWS_AS(build_modulation(make_h1({0, 0}), p), DegenerateInput);
}

TEST_CASE("gains always stay inside [alpha, 1]") {
    std::mt19937_64 rng(201);
    ModulationParams p;
    for (int rep = 0; rep < 100; ++rep) {
        const ModulationFunction f = build_modulation(random_h1(rng, 64), p);
        for (double g : f.gains) {
            CHECK(g >= p.alpha - 1e-12);
            CHECK(g <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("gain synthesis is antitone in the truncated histogram height") {
    std::mt19937_64 rng(202);
    ModulationParams p;
    for (int rep = 0; rep < 100; ++rep) {
        const ModulationTrace t = build_modulation_trace(random_h1(rng, 48), p);
        for (std::size_t a = 0; a < t.truncated.size(); ++a)
            for (std::size_t b = a + 1; b < t.truncated.size(); ++b) {
                if (t.truncated[a] >= t.truncated[b])
                    CHECK(t.inverted[a] <= t.inverted[b]);
                else
                    CHECK(t.inverted[a] >= t.inverted[b]);
                // The final affine rescale preserves the resmoothed order.
                if (t.resmoothed[a] >= t.resmoothed[b])
                    CHECK(t.gains[a] >= t.gains[b]);
            }
    }
}

TEST_CASE("build_modulation is invariant under positive scaling of the input") {
    std::mt19937_64 rng(203);
    std::uniform_real_distribution<double> s(1e-3, 1e3);
    ModulationParams p;
    for (int rep = 0; rep < 100; ++rep) {
        const Histogram1D h = random_h1(rng, 64);
        const double c = s(rng);
        Histogram1D hc = h;
        for (double& x : hc.counts) x *= c;
        const ModulationFunction f1 = build_modulation(h, p);
        const ModulationFunction f2 = build_modulation(hc, p);
        for (int i = 0; i < 64; ++i)
            CHECK(f1.gains[i] == doctest::Approx(f2.gains[i]).epsilon(1e-9));
    }
}

TEST_CASE("alpha raises the gain floor and gamma steepens pre-rescale ratios") {
    std::mt19937_64 rng(204);
    const Histogram1D h = random_h1(rng, 64);
    ModulationParams lo, hi;
    hi.alpha = 0.2;
    const auto fl = build_modulation(h, lo);
    const auto fh = build_modulation(h, hi);
    const double min_lo = *std::min_element(fl.gains.begin(), fl.gains.end());
    const double min_hi = *std::min_element(fh.gains.begin(), fh.gains.end());
    CHECK(min_lo == doctest::Approx(lo.alpha));
    CHECK(min_hi == doctest::Approx(hi.alpha));
    CHECK(min_hi > min_lo);

    ModulationParams g1, g2;
    g1.gamma = 1.0;
    g2.gamma = 2.5;
    const auto t1 = build_modulation_trace(h, g1);
    const auto t2 = build_modulation_trace(h, g2);
    for (int a = 0; a < 64; ++a)
        for (int b = 0; b < 64; ++b)
            if (t1.truncated[a] > t1.truncated[b]) {
                const double r1 = t1.inverted[a] / t1.inverted[b];
                const double r2 = t2.inverted[a] / t2.inverted[b];
                CHECK(r2 <= r1 + 1e-12);
            }
}

TEST_CASE("step curve is 0 below the cut and 1 from the cut on") {
    const ModulationFunction f = ModulationFunction::step(10, 0.3);
    CHECK(f.mode == ModulationMode::step_ablation);
    for (int i = 0; i < 10; ++i) CHECK(f.gains[i] == (i >= 3 ? 1.0 : 0.0));
}

TEST_CASE("apply_modulation is the per-bin elementwise product") {
    std::mt19937_64 rng(205);
    std::uniform_real_distribution<double> u(0.0, 9.0);
    Histogram2D h = make_h2(8, 5, std::vector<double>(40));
    for (auto& c : h.counts) c = u(rng);

    SUBCASE("identity gains") {
        ModulationFunction one;
        one.bins = 8;
        one.gains.assign(8, 1.0);
        CHECK(apply_modulation(h, one).counts == h.counts);
    }
    SUBCASE("step gains zero the rows below the cut") {
        const Histogram2D out = apply_modulation(h, ModulationFunction::step(8, 0.5));
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 8; ++i)
                CHECK(out.at(i, j) == (i >= 4 ? h.at(i, j) : 0.0));
    }
    SUBCASE("random gains match the loop oracle exactly") {
        ModulationFunction f;
        f.bins = 8;
        f.gains.resize(8);
        for (auto& g : f.gains) g = u(rng) / 9.0;
        const Histogram2D out = apply_modulation(h, f);
        for (int j = 0; j < 5; ++j)
            for (int i = 0; i < 8; ++i) CHECK(out.at(i, j) == h.at(i, j) * f.gains[i]);
    }
    SUBCASE("bin mismatch rejected") {
        CHECK_THROWS_AS(apply_modulation(h, ModulationFunction::step(16, 0.5)),
                        InvalidArgument);
    }
}
