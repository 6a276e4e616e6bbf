// Command-line front end: single-case detection, batch runs, phantom
// generation, mask evaluation and exploratory histogram dumps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "btd/batch.hpp"
#include "btd/heatmap.hpp"
#include "btd/phantom.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int crop_steps = -1;
    std::string modulation;
    double cdf_fraction = -1.0;
    int jobs = 1;
    bool stable_report = false;
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--config", o.config_path, "JSON config file");
    app->add_option("--out-dir", o.out_dir, "Output directory");
    app->add_option("--crop-steps", o.crop_steps, "Cropping steps (0..3)")
        ->check(CLI::Range(0, 3));
    app->add_option("--modulation", o.modulation, "adaptive or step")
        ->check(CLI::IsMember({"adaptive", "step"}));
    app->add_option("--cdf-fraction", o.cdf_fraction, "CDF threshold fraction");
    app->add_option("--jobs", o.jobs, "Parallel cases in batch mode")
        ->check(CLI::PositiveNumber);
    app->add_flag("--stable-report", o.stable_report,
                  "Zero timing fields for byte-stable reports");
}

btd::RunConfig make_config(const CommonOpts& o) {
    btd::RunConfig cfg;
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw btd::InvalidArgument("cannot open config " + o.config_path);
        nlohmann::json j;
        f >> j;
        btd::config_from_json(j, cfg);
    }
    // CLI flags override config keys.
    if (o.crop_steps >= 0) cfg.pipeline.crop_steps = o.crop_steps;
    if (!o.modulation.empty())
        cfg.pipeline.modulation_mode = o.modulation == "adaptive"
                                           ? btd::ModulationMode::adaptive
                                           : btd::ModulationMode::step_ablation;
    if (o.cdf_fraction > 0.0) {
        cfg.pipeline.cdf_fraction = o.cdf_fraction;
        cfg.detection.cdf_fraction = o.cdf_fraction;
    }
    cfg.out_dir = o.out_dir;
    cfg.jobs = o.jobs;
    cfg.stable_report = o.stable_report;
    cfg.pipeline.validate();
    cfg.detection.validate();
    return cfg;
}

int emit_report(const btd::RunConfig& cfg, const btd::RunReport& report) {
    const auto j = btd::report_to_json(report, cfg.stable_report);
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        std::ofstream(cfg.out_dir + "/report.json") << j.dump(2) << "\n";
        std::ofstream(cfg.out_dir + "/report.csv") << btd::report_to_csv(report);
    } else {
        std::cout << j.dump(2) << "\n";
    }
    for (const auto& rec : report.cases)
        if (!rec.ok) {
            std::cerr << "case " << rec.id << " failed: " << rec.error << "\n";
            return 1;
        }
    return 0;
}

// BraTS-style layout: <dir>/<case>/<case>_flair.nii[.gz] with an optional
// <case>_seg.nii[.gz] truth mask; flat directories of *_flair files work too.
std::vector<btd::CaseInput> scan_directory(const std::string& dir) {
    std::vector<btd::CaseInput> cases;
    auto probe = [](const fs::path& stem) -> std::string {
        for (const char* ext : {".nii.gz", ".nii"}) {
            fs::path p = stem;
            p += ext;
            if (fs::exists(p)) return p.string();
        }
        return {};
    };
    std::vector<fs::path> roots{dir};
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) roots.push_back(e.path());
    for (const auto& root : roots) {
        for (const auto& e : fs::directory_iterator(root)) {
            const std::string name = e.path().filename().string();
            const auto pos = name.find("_flair.nii");
            if (pos == std::string::npos) continue;
            btd::CaseInput c;
            c.id = name.substr(0, pos);
            c.scan_path = e.path().string();
            c.truth_path = probe(root / (c.id + "_seg"));
            cases.push_back(std::move(c));
        }
    }
    std::sort(cases.begin(), cases.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return cases;
}

std::vector<btd::CaseInput> read_case_list(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw btd::InvalidArgument("cannot open case list " + path);
    std::vector<btd::CaseInput> cases;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        btd::CaseInput c;
        std::istringstream ss(line);
        std::getline(ss, c.id, ',');
        std::getline(ss, c.scan_path, ',');
        std::getline(ss, c.truth_path, ',');
        if (c.id.empty() || c.scan_path.empty())
            throw btd::InvalidArgument("case list line needs id,scan[,truth]: " + line);
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free brain tumor detection in 3D Flair MRI"};
    app.require_subcommand(1);

    CommonOpts common;

    // detect
    auto* detect = app.add_subcommand("detect", "Process a single case");
    std::string scan_path, truth_path, case_id = "case";
    detect->add_option("--scan", scan_path, "Flair scan (.nii/.nii.gz)")->required();
    detect->add_option("--truth", truth_path, "Ground-truth mask for metrics");
    detect->add_option("--id", case_id, "Case identifier");
    add_common(detect, common);

    // batch
    auto* batch = app.add_subcommand("batch", "Process many cases");
    std::string batch_dir, case_list;
    batch->add_option("--dir", batch_dir, "Directory of cases (BraTS layout)");
    batch->add_option("--cases", case_list, "CSV case list: id,scan[,truth]");
    add_common(batch, common);

    // phantom
    auto* phantom = app.add_subcommand("phantom", "Generate synthetic test cases");
    std::uint64_t seed = 1;
    int count = 1;
    bool no_tumor = false;
    phantom->add_option("--seed", seed, "Base seed");
    phantom->add_option("--count", count, "Number of phantoms")->check(CLI::PositiveNumber);
    phantom->add_flag("--no-tumor", no_tumor, "Generate tumor-free phantoms");
    add_common(phantom, common);

    // eval
    auto* eval = app.add_subcommand("eval", "Score a predicted mask against truth");
    std::string pred_path, eval_truth;
    eval->add_option("--pred", pred_path, "Predicted mask")->required();
    eval->add_option("--truth", eval_truth, "Truth mask")->required();

    // histogram
    auto* histo = app.add_subcommand("histogram", "Dump a 2D histogram heatmap");
    std::string h_scan, h_axis = "axial", h_out = "histogram.pgm";
    int h_bins = 64;
    bool h_log = false, h_full_range = false;
    histo->add_option("--scan", h_scan, "Input scan")->required();
    histo->add_option("--axis", h_axis, "axial, coronal or sagittal")
        ->check(CLI::IsMember({"axial", "coronal", "sagittal"}));
    histo->add_option("--bins", h_bins, "Gray bins")->check(CLI::PositiveNumber);
    histo->add_option("--out", h_out, "Output PGM path");
    histo->add_flag("--log", h_log, "log1p intensity mapping");
    histo->add_flag("--full-range", h_full_range,
                    "Normalize to the full brain gray range instead of mean-anchored");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*detect) {
            auto cfg = make_config(common);
            btd::RunReport report =
                btd::run_batch(cfg, {{case_id, scan_path, truth_path}});
            return emit_report(cfg, report);
        }
        if (*batch) {
            auto cfg = make_config(common);
            std::vector<btd::CaseInput> cases;
            if (!case_list.empty())
                cases = read_case_list(case_list);
            else if (!batch_dir.empty())
                cases = scan_directory(batch_dir);
            else
                throw btd::InvalidArgument("batch needs --dir or --cases");
            if (cases.empty()) throw btd::InvalidArgument("no cases found");
            return emit_report(cfg, btd::run_batch(cfg, cases));
        }
        if (*phantom) {
            const std::string out = common.out_dir.empty() ? "." : common.out_dir;
            fs::create_directories(out);
            for (int k = 0; k < count; ++k) {
                btd::PhantomSpec spec = btd::standard_phantom_spec(seed + k);
                if (no_tumor) {
                    spec.tumor_semi = {0, 0, 0};
                    spec.noise_amp = 0.0;
                }
                const auto pc = btd::generate_phantom(spec);
                const std::string base =
                    out + "/phantom_" + std::to_string(seed + k);
                btd::write_nifti_volume(base + "_flair.nii.gz", pc.vol);
                btd::Volume3 tv(pc.truth.nx, pc.truth.ny, pc.truth.nz);
                for (std::size_t i = 0; i < tv.size(); ++i)
                    tv.data[i] = pc.truth.data[i];
                btd::write_nifti_volume(base + "_seg.nii.gz", tv);
                std::cout << base << "_flair.nii.gz\n";
            }
            return 0;
        }
        if (*eval) {
            const auto pred = btd::read_nifti(pred_path);
            const auto truth = btd::read_nifti(eval_truth);
            const auto s = btd::confusion_metrics(btd::mask_from_volume(pred.vol),
                                                  btd::mask_from_volume(truth.vol));
            nlohmann::ordered_json j{{"dice", s.dice},
                                     {"sensitivity", s.sensitivity},
                                     {"fdr", s.fdr},
                                     {"tp", s.counts.tp},
                                     {"fp", s.counts.fp},
                                     {"fn", s.counts.fn},
                                     {"tn", s.counts.tn}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*histo) {
            const auto scan = btd::read_nifti(h_scan);
            const auto mask = btd::brain_region(scan.vol);
            btd::NormalizedVolume norm;
            if (h_full_range) {
                // Exploratory mode: plain min/max scaling over the brain.
                double lo = 1e300, hi = -1e300;
                for (std::size_t i = 0; i < scan.vol.size(); ++i)
                    if (mask.data[i]) {
                        lo = std::min<double>(lo, scan.vol.data[i]);
                        hi = std::max<double>(hi, scan.vol.data[i]);
                    }
                if (!(hi > lo)) throw btd::DegenerateInput("constant brain");
                norm.nx = scan.vol.nx;
                norm.ny = scan.vol.ny;
                norm.nz = scan.vol.nz;
                norm.roles = scan.vol.roles;
                norm.data.resize(scan.vol.size(), btd::kExcludedGray);
                for (std::size_t i = 0; i < scan.vol.size(); ++i)
                    if (mask.data[i])
                        norm.data[i] =
                            static_cast<float>((scan.vol.data[i] - lo) / (hi - lo));
            } else {
                norm = btd::normalize_gray(scan.vol, mask);
            }
            const btd::AxisRole role = h_axis == "axial"
                                           ? btd::AxisRole::SI
                                           : (h_axis == "coronal" ? btd::AxisRole::AP
                                                                  : btd::AxisRole::LR);
            btd::render_heatmap(btd::histogram2d(norm, role, h_bins), h_out, h_log);
            return 0;
        }
    } catch (const btd::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
