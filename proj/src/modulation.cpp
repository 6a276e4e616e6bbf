#include "btd/modulation.hpp"

#include <algorithm>
#include <cmath>

namespace btd {

void ModulationParams::validate() const {
    if (!(0.0 < min_t && min_t < max_t && max_t <= 1.0))
        throw InvalidArgument("ModulationParams: need 0 < min_t < max_t <= 1");
    if (!(gamma > 0.0)) throw InvalidArgument("ModulationParams: gamma must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidArgument("ModulationParams: alpha must be in (0, 1)");
    if (smooth_radius < 1 || smooth_radius % 2 == 0)
        throw InvalidArgument("ModulationParams: smooth_radius must be odd >= 1");
    if (!(upper_section_lo >= 0.0 && upper_section_lo < 1.0))
        throw InvalidArgument("ModulationParams: upper_section_lo must be in [0, 1)");
}

ModulationParams fm2_defaults() {
    ModulationParams p;
    p.max_t = 0.56;
    p.min_t = 0.08;
    p.gamma = 1.2;
    p.alpha = 0.20;
    return p;
}

ModulationFunction ModulationFunction::step(int bins, double cut) {
    ModulationFunction f;
    f.bins = bins;
    f.mode = ModulationMode::step_ablation;
    f.gains.resize(bins);
    const auto edges = uniform_edges(bins);
    for (int i = 0; i < bins; ++i)
        f.gains[i] = edges[i] >= cut - 1e-12 ? 1.0 : 0.0;
    return f;
}

std::vector<double> box_smooth_1d(const std::vector<double>& v, int edge) {
    if (edge < 1 || edge % 2 == 0)
        throw InvalidArgument("box_smooth_1d: edge must be odd >= 1");
    const int n = static_cast<int>(v.size());
    const int r = (edge - 1) / 2;
    if (r == 0 || n == 0) return v;
    std::vector<double> out(n);
    const double inv = 1.0 / edge;
    for (int i = 0; i < n; ++i) {
        double s = v[i];
        for (int k = 1; k <= r; ++k)
            s += v[std::max(i - k, 0)] + v[std::min(i + k, n - 1)];
        out[i] = s * inv;
    }
    return out;
}

HalfSelection identify_tumor_free_half(const Histogram2D& h_left,
                                       const Histogram2D& h_right,
                                       const ModulationParams& params) {
    if (h_left.bins != h_right.bins || h_left.n_slices != h_right.n_slices)
        throw InvalidArgument("identify_tumor_free_half: histogram shape mismatch");
    params.validate();

    // A bin belongs to the upper section when its lower edge reaches the
    // section bound.
    double n_left = 0.0, n_right = 0.0;
    for (int i = 0; i < h_left.bins; ++i) {
        if (h_left.bin_edges[i] < params.upper_section_lo - 1e-12) continue;
        for (int j = 0; j < h_left.n_slices; ++j) {
            n_left += h_left.at(i, j);
            n_right += h_right.at(i, j);
        }
    }

    HalfSelection sel;
    sel.n_left = n_left;
    sel.n_right = n_right;
    sel.side = n_left <= n_right ? Side::left : Side::right;
    sel.h_tf = collapse_gray(sel.side == Side::left ? h_left : h_right);
    return sel;
}

Histogram1D truncate_bins(const Histogram1D& h_tf, const ModulationParams& params) {
    params.validate();
    const double peak = *std::max_element(h_tf.counts.begin(), h_tf.counts.end());
    if (!(peak > 0.0)) throw DegenerateInput("truncate_bins: zero-mass histogram");
    Histogram1D out = h_tf;
    for (double& c : out.counts) c = std::clamp(c / peak, params.min_t, params.max_t);
    return out;
}

ModulationTrace build_modulation_trace(const Histogram1D& h_tf,
                                       const ModulationParams& params) {
    params.validate();
    if (!(h_tf.total() > 0.0))
        throw DegenerateInput("build_modulation: zero-mass histogram");

    ModulationTrace t;
    t.smoothed = box_smooth_1d(h_tf.counts, params.smooth_radius);

    Histogram1D sm;
    sm.bins = h_tf.bins;
    sm.bin_edges = h_tf.bin_edges;
    sm.counts = t.smoothed;
    t.truncated = truncate_bins(sm, params).counts;

    t.inverted.resize(t.truncated.size());
    for (std::size_t i = 0; i < t.truncated.size(); ++i)
        t.inverted[i] = std::pow(1.0 / t.truncated[i], params.gamma);

    t.resmoothed = box_smooth_1d(t.inverted, params.smooth_radius);

    // Affine rescale of the smoothed inverted curve into [alpha, 1]; a flat
    // curve maps to alpha everywhere.
    const auto [mn_it, mx_it] =
        std::minmax_element(t.resmoothed.begin(), t.resmoothed.end());
    const double mn = *mn_it, mx = *mx_it;
    t.gains.resize(t.resmoothed.size());
    if (mx - mn < 1e-12) {
        std::fill(t.gains.begin(), t.gains.end(), params.alpha);
    } else {
        const double span = (1.0 - params.alpha) / (mx - mn);
        for (std::size_t i = 0; i < t.gains.size(); ++i)
            t.gains[i] = params.alpha + (t.resmoothed[i] - mn) * span;
    }
    return t;
}

ModulationFunction build_modulation(const Histogram1D& h_tf,
                                    const ModulationParams& params) {
    ModulationFunction f;
    f.bins = h_tf.bins;
    f.params = params;
    f.mode = ModulationMode::adaptive;
    f.gains = build_modulation_trace(h_tf, params).gains;
    return f;
}

Histogram2D apply_modulation(const Histogram2D& h, const ModulationFunction& f) {
    if (h.bins != f.bins)
        throw InvalidArgument("apply_modulation: bin count mismatch");
    Histogram2D out = h;
    for (int j = 0; j < h.n_slices; ++j)
        for (int i = 0; i < h.bins; ++i) out.at(i, j) = h.at(i, j) * f.gains[i];
    return out;
}

}  // namespace btd
