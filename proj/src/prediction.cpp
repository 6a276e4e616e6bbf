#include "btd/prediction.hpp"

#include <algorithm>
#include <cmath>

namespace btd {

void PipelineConfig::validate() const {
    fm1.validate();
    fm2.validate();
    if (bins < 2) throw InvalidArgument("PipelineConfig: bins must be >= 2");
    if (crop_steps < 0 || crop_steps > 3)
        throw InvalidArgument("PipelineConfig: crop_steps must be in 0..3");
    if (!(cdf_fraction > 0.0 && cdf_fraction < 1.0))
        throw InvalidArgument("PipelineConfig: cdf_fraction must be in (0, 1)");
    if (profile_smooth_radius < 1 || profile_smooth_radius % 2 == 0)
        throw InvalidArgument("PipelineConfig: profile_smooth_radius must be odd >= 1");
    if (minima_epsilon < 0.0)
        throw InvalidArgument("PipelineConfig: minima_epsilon must be >= 0");
    if (lp_radius < 1 || lp_radius % 2 == 0)
        throw InvalidArgument("PipelineConfig: lp_radius must be odd >= 1");
    if (ds_factor < 1) throw InvalidArgument("PipelineConfig: ds_factor must be >= 1");
    if (!(step_cut >= 0.0 && step_cut < 1.0))
        throw InvalidArgument("PipelineConfig: step_cut must be in [0, 1)");
}

namespace {

// Walk from the peak towards `limit` (inclusive, step -1 or +1).  Returns
// the index of the first local minimum: the running minimum is tracked and
// the walk stops once the curve rises above it by more than the relative
// tolerance `rel` (a ratio, so a flat background pedestal terminates the
// walk as readily as a deep valley).  Values at or below `floor` count as
// no-signal slices and bound the range directly, so a slow monotone decay
// into background does not drag the range to the grid boundary.
int walk_to_minimum(const std::vector<double>& s, const std::vector<double>& raw,
                    int peak, int limit, int step, double rel, double floor) {
    int best = peak;
    double best_v = s[peak];
    const double knee_eps = rel * s[peak];
    for (int k = peak + step; step > 0 ? k <= limit : k >= limit; k += step) {
        // The floor check reads the raw profile: smoothing smears the flank
        // outward, and the smeared tail would otherwise push the bound one
        // or two slices past the last slice that actually carries signal.
        if (raw[k] <= floor) return k - step;
        if (s[k] < best_v) {
            best_v = s[k];
            best = k;
        } else if (s[k] > best_v * (1.0 + rel)) {
            break;
        }
        // Knee detection: once well below the peak, a per-step drop smaller
        // than rel * peak means the descent has flattened into background.
        if (s[k] < 0.5 * s[peak] && s[k - step] - s[k] < knee_eps) break;
    }
    return best;
}

}  // namespace

CropRange find_tumor_slice_range(const LocationalProfile& p, AxisRole axis_role,
                                 const PipelineConfig& cfg) {
    const int n = p.n_slices();
    if (n < 3) throw InvalidArgument("find_tumor_slice_range: need >= 3 slices");

    const auto s = box_smooth_1d(p.values, cfg.profile_smooth_radius);
    const int peak = static_cast<int>(
        std::max_element(s.begin(), s.end()) - s.begin());
    if (!(s[peak] > 0.0))
        throw NoSignal("find_tumor_slice_range: all-zero profile");

    const double floor = cfg.minima_epsilon * s[peak];
    CropRange r;
    r.axis_role = axis_role;
    r.lo = walk_to_minimum(s, p.values, peak, 0, -1, cfg.minima_epsilon, floor);
    r.hi = walk_to_minimum(s, p.values, peak, n - 1, +1, cfg.minima_epsilon, floor);
    return r;
}

CoarseStep coarse_step(const NormalizedVolume& state, AxisRole axis_role,
                       const ModulationFunction& f, const PipelineConfig& cfg,
                       bool use_asymmetry, NormalizedVolume* cropped_out) {
    if (use_asymmetry && axis_role == AxisRole::LR)
        throw InvalidArgument("coarse_step: sagittal series has no LR symmetry");

    CoarseStep step;
    if (use_asymmetry) {
        auto [left, right] = split_halves(state);
        const auto hl = histogram2d(left, axis_role, cfg.bins);
        const auto hr = histogram2d(right, axis_role, cfg.bins);
        step.h_m = apply_modulation(asymmetry_map(hl, hr), f);
    } else {
        step.h_m = apply_modulation(histogram2d(state, axis_role, cfg.bins), f);
    }

    const int axis = state.roles.axis_of(axis_role);
    try {
        step.range = find_tumor_slice_range(collapse_slice(step.h_m), axis_role, cfg);
        step.cropped = true;
    } catch (const NoSignal&) {
        step.range.axis_role = axis_role;
        step.range.lo = 0;
        step.range.hi = state.dim(axis) - 1;
        step.cropped = false;
    }
    step.range.lo_orig = state.origin[axis] + step.range.lo;
    step.range.hi_orig = state.origin[axis] + step.range.hi;

    if (cropped_out) {
        *cropped_out = step.cropped
                           ? crop_axis(state, axis_role, step.range.lo, step.range.hi)
                           : state;
    }
    return step;
}

FinalPrediction final_predict(const NormalizedVolume& bbox_vol,
                              const ModulationFunction& fm2,
                              const PipelineConfig& cfg) {
    if (bbox_vol.size() == 0) throw NoSignal("final_predict: empty bounding box");

    FinalPrediction fp;
    fp.h_ba = histogram2d(bbox_vol, AxisRole::SI, cfg.bins);
    fp.h_bc = histogram2d(bbox_vol, AxisRole::AP, cfg.bins);
    fp.h_bs = histogram2d(bbox_vol, AxisRole::LR, cfg.bins);
    if (!(fp.h_ba.total() > 0.0))
        throw NoSignal("final_predict: bounding box has no included voxels");
    fp.h_pa = apply_modulation(fp.h_ba, fm2);
    fp.h_pc = apply_modulation(fp.h_bc, fm2);
    fp.h_ps = apply_modulation(fp.h_bs, fm2);
    fp.h1d_pred = collapse_gray(fp.h_pa);
    fp.cdf_pred = cdf_from_h1d(fp.h1d_pred);
    return fp;
}

PredictionResult run_pipeline(const Volume3& vol, const PipelineConfig& cfg) {
    cfg.validate();

    PredictionResult res;
    NormalizedVolume state;
    try {
        const Volume3 pre = preprocess(vol, cfg.lp_radius, cfg.ds_factor);
        const BrainMask mask = brain_region(pre);
        res.working = normalize_gray(pre, mask);
        state = res.working;
    } catch (const DegenerateInput& e) {
        throw PipelineError("preprocess", e.what());
    }

    // f_m1 and f_m2 are both built from the tumor-free half of the
    // original, uncropped volume.
    try {
        auto [left, right] = split_halves(state);
        const auto hl = histogram2d(left, AxisRole::SI, cfg.bins);
        const auto hr = histogram2d(right, AxisRole::SI, cfg.bins);
        res.half = identify_tumor_free_half(hl, hr, cfg.fm1);
        if (cfg.modulation_mode == ModulationMode::adaptive) {
            res.fm1_used = build_modulation(res.half.h_tf, cfg.fm1);
            res.fm2_used = build_modulation(res.half.h_tf, cfg.fm2);
        } else {
            res.fm1_used = ModulationFunction::step(cfg.bins, cfg.step_cut);
            res.fm2_used = ModulationFunction::step(cfg.bins, cfg.step_cut);
        }
    } catch (const DegenerateInput& e) {
        throw PipelineError("modulation", e.what());
    }

    // Axial and coronal steps use asymmetry maps, the sagittal step the
    // plain histogram; crop_steps < 3 disables the later crops.
    const struct {
        AxisRole role;
        bool asym;
    } plan[3] = {{AxisRole::SI, true}, {AxisRole::AP, true}, {AxisRole::LR, false}};
    for (int k = 0; k < cfg.crop_steps; ++k) {
        NormalizedVolume next;
        res.steps.push_back(
            coarse_step(state, plan[k].role, res.fm1_used, cfg, plan[k].asym, &next));
        state = std::move(next);
    }
    res.bbox_vol = state;

    const AxisRole bbox_order[3] = {AxisRole::SI, AxisRole::AP, AxisRole::LR};
    for (int i = 0; i < 3; ++i) {
        const AxisRole role = bbox_order[i];
        const int axis = state.roles.axis_of(role);
        CropRange r;
        r.axis_role = role;
        r.lo = 0;
        r.hi = state.dim(axis) - 1;
        r.lo_orig = state.origin[axis];
        r.hi_orig = state.origin[axis] + state.dim(axis) - 1;
        res.bbox[i] = r;
    }

    try {
        FinalPrediction fp = final_predict(state, res.fm2_used, cfg);
        res.h_ba = std::move(fp.h_ba);
        res.h_bc = std::move(fp.h_bc);
        res.h_bs = std::move(fp.h_bs);
        res.h_pa = std::move(fp.h_pa);
        res.h_pc = std::move(fp.h_pc);
        res.h_ps = std::move(fp.h_ps);
        res.h1d_pred = std::move(fp.h1d_pred);
        res.cdf_pred = std::move(fp.cdf_pred);
    } catch (const DegenerateInput& e) {
        throw PipelineError("final_predict", e.what());
    } catch (const NoSignal& e) {
        throw PipelineError("final_predict", e.what());
    }
    return res;
}

}  // namespace btd
