#ifndef BTD_MODULATION_HPP
#define BTD_MODULATION_HPP

#include "btd/histogram.hpp"

namespace btd {

// Parameters of the per-gray-bin gain curve.  The defaults are the
// coarse-step settings; see fm2_defaults() for the milder final-step curve.
struct ModulationParams {
    double max_t = 0.48;   // truncation ceiling on the peak-normalized histogram
    double min_t = 0.05;   // truncation floor
    double gamma = 1.8;    // inversion exponent
    double alpha = 0.02;   // additive gain floor
    int smooth_radius = 5;          // odd kernel edge of both 1D box smooths
    double upper_section_lo = 0.55; // lower gray bound of the upper section

    void validate() const;
};

// Milder curve for the final prediction: higher truncation bounds, gentler
// exponent, larger floor.
ModulationParams fm2_defaults();

enum class ModulationMode { adaptive, step_ablation };

struct ModulationFunction {
    int bins = 0;
    std::vector<double> gains;
    ModulationParams params;
    ModulationMode mode = ModulationMode::adaptive;

    // Unit-step ablation curve: 0 below `cut`, 1 at and above.
    static ModulationFunction step(int bins, double cut);
};

enum class Side { left, right };

struct HalfSelection {
    Side side = Side::left;
    double n_left = 0.0;   // upper-section pixel count, left half
    double n_right = 0.0;  // upper-section pixel count, right half
    Histogram1D h_tf;      // 1D gray distribution of the chosen half
};

// Pick the presumed tumor-free half by counting upper-gray-section pixels;
// ties go left.
HalfSelection identify_tumor_free_half(const Histogram2D& h_left,
                                       const Histogram2D& h_right,
                                       const ModulationParams& params);

// Peak-normalize to [0,1], then clamp every bin to [min_t, max_t].
Histogram1D truncate_bins(const Histogram1D& h_tf, const ModulationParams& params);

// Intermediate curves of the gain synthesis, kept for inspection and tests.
struct ModulationTrace {
    std::vector<double> smoothed;    // box-smoothed input
    std::vector<double> truncated;   // peak-normalized + clamped
    std::vector<double> inverted;    // (1/truncated)^gamma
    std::vector<double> resmoothed;  // second box smooth
    std::vector<double> gains;       // affine-rescaled to [alpha, 1]
};

ModulationTrace build_modulation_trace(const Histogram1D& h_tf,
                                       const ModulationParams& params);

// Full synthesis: smooth, truncate, invert with exponent gamma, smooth
// again, rescale into [alpha, 1].
ModulationFunction build_modulation(const Histogram1D& h_tf,
                                    const ModulationParams& params);

// out[i][j] = h[i][j] * gains[i].
Histogram2D apply_modulation(const Histogram2D& h, const ModulationFunction& f);

// 1D box smooth with replicate padding; `edge` is the odd kernel edge.
std::vector<double> box_smooth_1d(const std::vector<double>& v, int edge);

}  // namespace btd

#endif
