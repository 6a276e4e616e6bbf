#include "btd/batch.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "btd/heatmap.hpp"

namespace btd {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double json_num(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

DetectionOutput detect_mask(const PredictionResult& pred,
                            const DetectionParams& params,
                            std::array<int, 3> full_dims, int ds_factor) {
    DetectionOutput out;
    out.threshold = threshold_from_cdf(pred.cdf_pred, params.cdf_fraction);
    BinaryMask3 coarse = binarize(pred.bbox_vol, out.threshold);
    out.mask_working = morph_smooth(coarse, params);
    out.mask_full = embed_mask(out.mask_working, full_dims, ds_factor);
    return out;
}

CaseMetrics evaluate_case(const PredictionResult& pred, const BinaryMask3& mask_full,
                          const BinaryMask3& truth_full, const PipelineConfig& cfg) {
    CaseMetrics m;
    const auto det = confusion_metrics(mask_full, truth_full);
    m.dice = det.dice;
    m.sensitivity = det.sensitivity;
    m.fdr = det.fdr;

    // Truth histograms are built on the bounding-box grid, restricted to
    // the (decimated) truth mask.
    BinaryMask3 truth_ds = truth_full;
    truth_ds.roles = pred.working.roles;
    truth_ds = downsample_mask(truth_ds, cfg.ds_factor);
    const AxisRole order[3] = {AxisRole::SI, AxisRole::AP, AxisRole::LR};
    for (int i = 0; i < 3; ++i)
        truth_ds = crop_axis(truth_ds, order[i], pred.bbox[i].lo_orig,
                             pred.bbox[i].hi_orig);

    const Histogram2D* preds[3] = {&pred.h_pa, &pred.h_pc, &pred.h_ps};
    double* ssims[3] = {&m.ssim_axial, &m.ssim_coronal, &m.ssim_sagittal};
    double* ccs[3] = {&m.cc_axial, &m.cc_coronal, &m.cc_sagittal};
    double* mses[3] = {&m.mse_axial, &m.mse_coronal, &m.mse_sagittal};
    for (int i = 0; i < 3; ++i) {
        const Histogram2D truth_h =
            histogram2d(pred.bbox_vol, order[i], cfg.bins, &truth_ds.data);
        *ssims[i] = ssim2d(*preds[i], truth_h);
        const auto sim = similarity_scores(*preds[i], truth_h);
        *ccs[i] = sim.cc;
        *mses[i] = sim.mse;
    }
    return m;
}

CaseRecord run_case(const RunConfig& cfg, const CaseInput& input) {
    CaseRecord rec;
    rec.id = input.id;
    rec.scan_path = input.scan_path;
    rec.truth_path = input.truth_path;
    try {
        auto t0 = Clock::now();
        NiftiVolume scan = read_nifti(input.scan_path, cfg.roles_override);
        rec.timings_ms["read"] = ms_since(t0);

        t0 = Clock::now();
        PredictionResult pred = run_pipeline(scan.vol, cfg.pipeline);
        rec.timings_ms["pipeline"] = ms_since(t0);

        t0 = Clock::now();
        DetectionOutput det =
            detect_mask(pred, cfg.detection, scan.vol.dims(), cfg.pipeline.ds_factor);
        rec.timings_ms["detect"] = ms_since(t0);

        rec.half_side = pred.half.side == Side::left ? "left" : "right";
        rec.threshold = det.threshold;
        rec.positives = det.mask_full.positive_count;
        for (int i = 0; i < 3; ++i)
            rec.bbox[i] = {pred.bbox[i].lo_orig, pred.bbox[i].hi_orig};

        if (!input.truth_path.empty()) {
            t0 = Clock::now();
            NiftiVolume truth = read_nifti(input.truth_path, cfg.roles_override);
            if (truth.vol.dims() != scan.vol.dims())
                throw InvalidArgument("truth mask dims do not match scan");
            BinaryMask3 truth_mask = mask_from_volume(truth.vol);
            truth_mask.roles = scan.vol.roles;
            rec.metrics =
                evaluate_case(pred, det.mask_full, truth_mask, cfg.pipeline);
            rec.timings_ms["metrics"] = ms_since(t0);
        }

        if (!cfg.out_dir.empty()) {
            t0 = Clock::now();
            namespace fs = std::filesystem;
            fs::create_directories(cfg.out_dir);
            const std::string base = cfg.out_dir + "/" + input.id;
            write_nifti_mask(base + "_mask.nii.gz", det.mask_full, scan.header);
            if (cfg.write_heatmaps) {
                render_heatmap(pred.h_pa, base + "_pred_axial.pgm", true);
                render_heatmap(pred.h_pc, base + "_pred_coronal.pgm", true);
                render_heatmap(pred.h_ps, base + "_pred_sagittal.pgm", true);
            }
            rec.timings_ms["write"] = ms_since(t0);
        }
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

RunReport run_batch(const RunConfig& cfg, const std::vector<CaseInput>& inputs) {
    const auto t0 = Clock::now();
    RunReport report;
    report.config = config_to_json(cfg);
    report.cases.resize(inputs.size());

    const int jobs = std::max(1, cfg.jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= inputs.size()) return;
            report.cases[i] = run_case(cfg, inputs[i]);
        }
    };
    if (jobs == 1 || inputs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Aggregation order is fixed by case id, independent of --jobs.
    std::sort(report.cases.begin(), report.cases.end(),
              [](const CaseRecord& a, const CaseRecord& b) { return a.id < b.id; });

    const std::pair<const char*, double CaseMetrics::*> fields[] = {
        {"dice", &CaseMetrics::dice},
        {"sensitivity", &CaseMetrics::sensitivity},
        {"fdr", &CaseMetrics::fdr},
        {"ssim_axial", &CaseMetrics::ssim_axial},
        {"ssim_coronal", &CaseMetrics::ssim_coronal},
        {"ssim_sagittal", &CaseMetrics::ssim_sagittal},
        {"cc_axial", &CaseMetrics::cc_axial},
        {"cc_coronal", &CaseMetrics::cc_coronal},
        {"cc_sagittal", &CaseMetrics::cc_sagittal},
        {"mse_axial", &CaseMetrics::mse_axial},
        {"mse_coronal", &CaseMetrics::mse_coronal},
        {"mse_sagittal", &CaseMetrics::mse_sagittal},
    };
    for (const auto& [name, member] : fields) {
        std::vector<double> values;
        for (const auto& rec : report.cases)
            if (rec.ok && rec.metrics) {
                const double v = (*rec.metrics).*member;
                if (std::isfinite(v)) values.push_back(v);
            }
        if (!values.empty()) report.summary[name] = summarize(values);
    }
    report.wall_ms = ms_since(t0);
    return report;
}

nlohmann::ordered_json report_to_json(const RunReport& report, bool stable) {
    nlohmann::ordered_json j;
    j["tool_version"] = report.tool_version;
    j["config"] = report.config;
    j["wall_ms"] = stable ? 0.0 : report.wall_ms;
    j["cases"] = nlohmann::ordered_json::array();
    for (const auto& rec : report.cases) {
        nlohmann::ordered_json c;
        c["id"] = rec.id;
        c["scan"] = rec.scan_path;
        c["truth"] = rec.truth_path;
        c["ok"] = rec.ok;
        c["error"] = rec.error;
        c["half_side"] = rec.half_side;
        c["threshold"] = json_num(rec.threshold);
        c["positives"] = rec.positives;
        c["bbox"] = {{"axial", rec.bbox[0]}, {"coronal", rec.bbox[1]},
                     {"sagittal", rec.bbox[2]}};
        if (rec.metrics) {
            const CaseMetrics& m = *rec.metrics;
            c["metrics"] = {
                {"dice", json_num(m.dice)},
                {"sensitivity", json_num(m.sensitivity)},
                {"fdr", json_num(m.fdr)},
                {"ssim_axial", json_num(m.ssim_axial)},
                {"ssim_coronal", json_num(m.ssim_coronal)},
                {"ssim_sagittal", json_num(m.ssim_sagittal)},
                {"cc_axial", json_num(m.cc_axial)},
                {"cc_coronal", json_num(m.cc_coronal)},
                {"cc_sagittal", json_num(m.cc_sagittal)},
                {"mse_axial", json_num(m.mse_axial)},
                {"mse_coronal", json_num(m.mse_coronal)},
                {"mse_sagittal", json_num(m.mse_sagittal)},
            };
        }
        nlohmann::ordered_json t = nlohmann::ordered_json::object();
        for (const auto& [stage, ms] : rec.timings_ms) t[stage] = stable ? 0.0 : ms;
        c["timings_ms"] = t;
        j["cases"].push_back(c);
    }
    j["summary"] = nlohmann::ordered_json::object();
    for (const auto& [name, s] : report.summary)
        j["summary"][name] = {{"mean", json_num(s.mean)},
                              {"median", json_num(s.median)},
                              {"q25", json_num(s.q25)},
                              {"q75", json_num(s.q75)}};
    return j;
}

std::string report_to_csv(const RunReport& report) {
    std::ostringstream out;
    out << "id,ok,half_side,threshold,positives,"
           "axial_lo,axial_hi,coronal_lo,coronal_hi,sagittal_lo,sagittal_hi,"
           "dice,sensitivity,fdr,ssim_axial,ssim_coronal,ssim_sagittal,"
           "cc_axial,cc_coronal,cc_sagittal,mse_axial,mse_coronal,mse_sagittal\n";
    for (const auto& rec : report.cases) {
        out << rec.id << ',' << (rec.ok ? 1 : 0) << ',' << rec.half_side << ','
            << rec.threshold << ',' << rec.positives;
        for (const auto& [lo, hi] : rec.bbox) out << ',' << lo << ',' << hi;
        if (rec.metrics) {
            const CaseMetrics& m = *rec.metrics;
            for (double v : {m.dice, m.sensitivity, m.fdr, m.ssim_axial,
                             m.ssim_coronal, m.ssim_sagittal, m.cc_axial,
                             m.cc_coronal, m.cc_sagittal, m.mse_axial,
                             m.mse_coronal, m.mse_sagittal})
                out << ',' << v;
        } else {
            for (int k = 0; k < 12; ++k) out << ',';
        }
        out << '\n';
    }
    return out.str();
}

namespace {

nlohmann::ordered_json modulation_to_json(const ModulationParams& p) {
    return {{"max_t", p.max_t},       {"min_t", p.min_t},
            {"gamma", p.gamma},       {"alpha", p.alpha},
            {"smooth_radius", p.smooth_radius},
            {"upper_section_lo", p.upper_section_lo}};
}

void modulation_from_json(const nlohmann::json& j, ModulationParams& p) {
    p.max_t = j.value("max_t", p.max_t);
    p.min_t = j.value("min_t", p.min_t);
    p.gamma = j.value("gamma", p.gamma);
    p.alpha = j.value("alpha", p.alpha);
    p.smooth_radius = j.value("smooth_radius", p.smooth_radius);
    p.upper_section_lo = j.value("upper_section_lo", p.upper_section_lo);
}

}  // namespace

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["pipeline"] = {
        {"bins", cfg.pipeline.bins},
        {"crop_steps", cfg.pipeline.crop_steps},
        {"modulation_mode", cfg.pipeline.modulation_mode == ModulationMode::adaptive
                                ? "adaptive"
                                : "step"},
        {"step_cut", cfg.pipeline.step_cut},
        {"cdf_fraction", cfg.pipeline.cdf_fraction},
        {"profile_smooth_radius", cfg.pipeline.profile_smooth_radius},
        {"minima_epsilon", cfg.pipeline.minima_epsilon},
        {"lp_radius", cfg.pipeline.lp_radius},
        {"ds_factor", cfg.pipeline.ds_factor},
        {"fm1", modulation_to_json(cfg.pipeline.fm1)},
        {"fm2", modulation_to_json(cfg.pipeline.fm2)},
    };
    j["detection"] = {{"cdf_fraction", cfg.detection.cdf_fraction},
                      {"morph_kernel_edge", cfg.detection.morph_kernel_edge},
                      {"morph_floor", cfg.detection.morph_floor}};
    return j;
}

void config_from_json(const nlohmann::json& j, RunConfig& cfg) {
    if (j.contains("pipeline")) {
        const auto& p = j["pipeline"];
        cfg.pipeline.bins = p.value("bins", cfg.pipeline.bins);
        cfg.pipeline.crop_steps = p.value("crop_steps", cfg.pipeline.crop_steps);
        if (p.contains("modulation_mode")) {
            const std::string m = p["modulation_mode"];
            if (m == "adaptive")
                cfg.pipeline.modulation_mode = ModulationMode::adaptive;
            else if (m == "step")
                cfg.pipeline.modulation_mode = ModulationMode::step_ablation;
            else
                throw InvalidArgument("config: modulation_mode must be adaptive or step");
        }
        cfg.pipeline.step_cut = p.value("step_cut", cfg.pipeline.step_cut);
        cfg.pipeline.cdf_fraction = p.value("cdf_fraction", cfg.pipeline.cdf_fraction);
        cfg.pipeline.profile_smooth_radius =
            p.value("profile_smooth_radius", cfg.pipeline.profile_smooth_radius);
        cfg.pipeline.minima_epsilon =
            p.value("minima_epsilon", cfg.pipeline.minima_epsilon);
        cfg.pipeline.lp_radius = p.value("lp_radius", cfg.pipeline.lp_radius);
        cfg.pipeline.ds_factor = p.value("ds_factor", cfg.pipeline.ds_factor);
        if (p.contains("fm1")) modulation_from_json(p["fm1"], cfg.pipeline.fm1);
        if (p.contains("fm2")) modulation_from_json(p["fm2"], cfg.pipeline.fm2);
    }
    if (j.contains("detection")) {
        const auto& d = j["detection"];
        cfg.detection.cdf_fraction =
            d.value("cdf_fraction", cfg.detection.cdf_fraction);
        cfg.detection.morph_kernel_edge =
            d.value("morph_kernel_edge", cfg.detection.morph_kernel_edge);
        cfg.detection.morph_floor = d.value("morph_floor", cfg.detection.morph_floor);
    }
}

}  // namespace btd
