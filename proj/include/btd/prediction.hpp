#ifndef BTD_PREDICTION_HPP
#define BTD_PREDICTION_HPP

#include <optional>

#include "btd/modulation.hpp"

namespace btd {

struct PipelineConfig {
    ModulationParams fm1;                  // coarse-step modulation
    ModulationParams fm2 = fm2_defaults(); // final-step modulation
    int bins = 64;
    int crop_steps = 3;                    // 0..3 (ablation variants)
    ModulationMode modulation_mode = ModulationMode::adaptive;
    double step_cut = 0.3;                 // cut of the step-ablation curve
    double cdf_fraction = 0.20;
    int profile_smooth_radius = 3;         // odd kernel edge
    double minima_epsilon = 0.02;          // relative dip tolerance
    int lp_radius = 3;                     // preprocessing kernel edge
    int ds_factor = 2;                     // in-plane decimation

    void validate() const;
};

// Inclusive slice range along one series.  lo/hi are indices in the grid
// the range was found on; lo_orig/hi_orig the same range in working-grid
// (preprocessed, uncropped) coordinates.
struct CropRange {
    AxisRole axis_role = AxisRole::SI;
    int lo = 0, hi = 0;
    int lo_orig = 0, hi_orig = 0;
};

// One coarse predict-and-crop step.
struct CoarseStep {
    Histogram2D h_m;          // modulated (asymmetry or plain) histogram
    CropRange range;
    bool cropped = false;     // false when no signal was found
};

struct PredictionResult {
    Histogram2D h_pa, h_pc, h_ps;     // final predicted histograms per axis
    Histogram2D h_ba, h_bc, h_bs;     // bounding-box histograms (pre-modulation)
    Histogram1D h1d_pred;
    CDFCurve cdf_pred;
    std::array<CropRange, 3> bbox;    // SI, AP, LR order
    HalfSelection half;
    ModulationFunction fm1_used, fm2_used;
    std::vector<CoarseStep> steps;    // axial, coronal, sagittal
    NormalizedVolume working;         // preprocessed + normalized full grid
    NormalizedVolume bbox_vol;        // after the crop sequence
};

// Locate the tumor slice range of a locational profile: smooth, take the
// global maximum, walk outward to the first local minimum on each side.
// Throws NoSignal on an all-zero profile.
CropRange find_tumor_slice_range(const LocationalProfile& p, AxisRole axis_role,
                                 const PipelineConfig& cfg);

// One coarse prediction step on the current working volume.  Asymmetry
// steps (axial, coronal) use the LR-half histogram difference; the
// sagittal step uses the plain histogram.
CoarseStep coarse_step(const NormalizedVolume& state, AxisRole axis_role,
                       const ModulationFunction& f, const PipelineConfig& cfg,
                       bool use_asymmetry, NormalizedVolume* cropped_out);

struct FinalPrediction {
    Histogram2D h_ba, h_bc, h_bs;
    Histogram2D h_pa, h_pc, h_ps;
    Histogram1D h1d_pred;
    CDFCurve cdf_pred;
};

FinalPrediction final_predict(const NormalizedVolume& bbox_vol,
                              const ModulationFunction& fm2,
                              const PipelineConfig& cfg);

// The full dataflow: preprocess, normalize, build the modulation functions
// from the original halves, run the three predict-and-crop steps, finalize.
PredictionResult run_pipeline(const Volume3& vol, const PipelineConfig& cfg);

}  // namespace btd

#endif
