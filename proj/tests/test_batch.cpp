#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "btd/batch.hpp"
#include "btd/phantom.hpp"

using namespace btd;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    fs::path dir;
    std::vector<CaseInput> cases;

    Fixture() {
        dir = fs::temp_directory_path() / "btd_batch_tests";
        fs::create_directories(dir);
        for (std::uint64_t seed : {31, 32, 33}) {
            const PhantomCase pc = generate_phantom(standard_phantom_spec(seed));
            const std::string base = (dir / ("phantom_" + std::to_string(seed))).string();
            write_nifti_volume(base + "_flair.nii.gz", pc.vol);
            Volume3 tv(pc.truth.nx, pc.truth.ny, pc.truth.nz);
            for (std::size_t i = 0; i < tv.size(); ++i)
                tv.data[i] = static_cast<float>(pc.truth.data[i]);
            write_nifti_volume(base + "_seg.nii.gz", tv);
            cases.push_back({"phantom_" + std::to_string(seed),
                             base + "_flair.nii.gz", base + "_seg.nii.gz"});
        }
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

RunConfig base_config() {
    RunConfig cfg;
    cfg.write_heatmaps = false;
    cfg.stable_report = true;
    return cfg;
}

}  // namespace

TEST_CASE("batch of three phantoms produces records and a dice summary") {
    const RunReport report = run_batch(base_config(), fixture().cases);
    REQUIRE(report.cases.size() == 3);
    for (const CaseRecord& rec : report.cases) {
        CHECK(rec.ok);
        CHECK(rec.error.empty());
        REQUIRE(rec.metrics.has_value());
        CHECK(rec.metrics->dice >= 0.0);
        CHECK(rec.metrics->dice <= 1.0);
        CHECK(rec.positives > 0);
        CHECK((rec.half_side == "left" || rec.half_side == "right"));
    }
    REQUIRE(report.summary.count("dice") == 1);
    const CohortSummary& s = report.summary.at("dice");
    CHECK(s.q25 <= s.median);
    CHECK(s.median <= s.q75);
    CHECK(report.summary.count("ssim_axial") == 1);
    // Case order is sorted by id.
    CHECK(report.cases[0].id < report.cases[1].id);
    CHECK(report.cases[1].id < report.cases[2].id);
}

TEST_CASE("stable reports are byte-identical across runs and job counts") {
    RunConfig cfg = base_config();
    const std::string a = report_to_json(run_batch(cfg, fixture().cases), true).dump(2);
    const std::string b = report_to_json(run_batch(cfg, fixture().cases), true).dump(2);
    CHECK(a == b);
    cfg.jobs = 3;
    const std::string c = report_to_json(run_batch(cfg, fixture().cases), true).dump(2);
    CHECK(a == c);
}

TEST_CASE("run_case without truth omits metrics; with out_dir writes artifacts") {
    RunConfig cfg = base_config();
    cfg.write_heatmaps = true;
    cfg.out_dir = (fixture().dir / "out").string();
    CaseInput input = fixture().cases[0];
    input.truth_path.clear();
    const CaseRecord rec = run_case(cfg, input);
    REQUIRE(rec.ok);
    CHECK(!rec.metrics.has_value());

    const fs::path mask_path = fs::path(cfg.out_dir) / (input.id + "_mask.nii.gz");
    REQUIRE(fs::exists(mask_path));
    const NiftiVolume mask = read_nifti(mask_path.string());
    const BinaryMask3 m = mask_from_volume(mask.vol);
    CHECK(m.positive_count == rec.positives);
    for (const char* axis : {"axial", "coronal", "sagittal"})
        CHECK(fs::exists(fs::path(cfg.out_dir) /
                         (input.id + "_pred_" + axis + ".pgm")));
}

TEST_CASE("failing cases are recorded without aborting the batch") {
    RunConfig cfg = base_config();
    std::vector<CaseInput> cases = fixture().cases;
    cases.push_back({"zz_missing", (fixture().dir / "absent.nii.gz").string(), ""});
    const RunReport report = run_batch(cfg, cases);
    REQUIRE(report.cases.size() == 4);
    const CaseRecord& bad = report.cases.back();  // sorted last by id
    CHECK(bad.id == "zz_missing");
    CHECK(!bad.ok);
    CHECK(!bad.error.empty());
    CHECK(report.cases[0].ok);
    // The summary still aggregates the three good cases.
    CHECK(report.summary.count("dice") == 1);
}

TEST_CASE("csv report has the documented fixed columns") {
    const RunReport report = run_batch(base_config(), fixture().cases);
    const std::string csv = report_to_csv(report);
    std::istringstream ss(csv);
    std::string header;
    std::getline(ss, header);
    CHECK(header ==
          "id,ok,half_side,threshold,positives,"
          "axial_lo,axial_hi,coronal_lo,coronal_hi,sagittal_lo,sagittal_hi,"
          "dice,sensitivity,fdr,ssim_axial,ssim_coronal,ssim_sagittal,"
          "cc_axial,cc_coronal,cc_sagittal,mse_axial,mse_coronal,mse_sagittal");
    int rows = 0;
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) {
            ++rows;
            CHECK(std::count(line.begin(), line.end(), ',') == 22);
        }
    CHECK(rows == 3);
}

TEST_CASE("json report structure") {
    const RunReport report = run_batch(base_config(), {fixture().cases[0]});
    const auto j = report_to_json(report, true);
    CHECK(j["tool_version"] == kToolVersion);
    CHECK(j["wall_ms"] == 0.0);
    REQUIRE(j["cases"].size() == 1);
    const auto& c = j["cases"][0];
    CHECK(c["ok"] == true);
    CHECK(c["metrics"].contains("ssim_sagittal"));
    CHECK(c["bbox"].contains("axial"));
    for (const auto& [stage, ms] : c["timings_ms"].items())
        CHECK(ms.get<double>() == 0.0);
    CHECK(j["config"]["pipeline"]["bins"] == 64);
}

TEST_CASE("config json roundtrip preserves every field") {
    RunConfig cfg;
    cfg.pipeline.bins = 48;
    cfg.pipeline.crop_steps = 2;
    cfg.pipeline.modulation_mode = ModulationMode::step_ablation;
    cfg.pipeline.step_cut = 0.25;
    cfg.pipeline.cdf_fraction = 0.15;
    cfg.pipeline.profile_smooth_radius = 5;
    cfg.pipeline.minima_epsilon = 0.03;
    cfg.pipeline.lp_radius = 5;
    cfg.pipeline.ds_factor = 1;
    cfg.pipeline.fm1.max_t = 0.5;
    cfg.pipeline.fm2.alpha = 0.09;
    cfg.detection.morph_floor = 0.4;

    RunConfig back;
    config_from_json(config_to_json(cfg), back);
    CHECK(back.pipeline.bins == 48);
    CHECK(back.pipeline.crop_steps == 2);
    CHECK(back.pipeline.modulation_mode == ModulationMode::step_ablation);
    CHECK(back.pipeline.step_cut == 0.25);
    CHECK(back.pipeline.cdf_fraction == 0.15);
    CHECK(back.pipeline.profile_smooth_radius == 5);
    CHECK(back.pipeline.minima_epsilon == 0.03);
    CHECK(back.pipeline.lp_radius == 5);
    CHECK(back.pipeline.ds_factor == 1);
    CHECK(back.pipeline.fm1.max_t == 0.5);
    CHECK(back.pipeline.fm2.alpha == 0.09);
    CHECK(back.detection.morph_floor == 0.4);

    CHECK_THROWS_AS(
        config_from_json(nlohmann::json{{"pipeline", {{"modulation_mode", "x"}}}},
                         back),
        InvalidArgument);
}

TEST_CASE("detect_mask embeds the working mask at full resolution") {
    const PhantomCase pc = generate_phantom(standard_phantom_spec(31));
    PipelineConfig pcfg;
    const PredictionResult pred = run_pipeline(pc.vol, pcfg);
    const DetectionOutput det =
        detect_mask(pred, DetectionParams{}, pc.vol.dims(), pcfg.ds_factor);
    CHECK(det.mask_full.dims() == pc.vol.dims());
    CHECK(det.threshold >= 0.0);
    CHECK(det.threshold <= 1.0);
    CHECK(det.mask_full.positive_count >= det.mask_working.positive_count);
}
