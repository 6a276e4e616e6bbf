#ifndef BTD_BATCH_HPP
#define BTD_BATCH_HPP

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "btd/metrics.hpp"
#include "btd/nifti.hpp"
#include "btd/prediction.hpp"

namespace btd {

inline constexpr const char* kToolVersion = "btdetect 0.1.0";

struct RunConfig {
    PipelineConfig pipeline;
    DetectionParams detection;
    std::optional<AxisRoles> roles_override;
    std::string out_dir;        // empty: no artifact files written
    bool write_heatmaps = true;
    bool stable_report = false; // zero out timings and wall time
    int jobs = 1;
};

struct CaseInput {
    std::string id;
    std::string scan_path;
    std::string truth_path;  // empty when no ground truth
};

struct CaseMetrics {
    double dice = 0, sensitivity = 0, fdr = 0;
    double ssim_axial = 0, ssim_coronal = 0, ssim_sagittal = 0;
    double cc_axial = 0, cc_coronal = 0, cc_sagittal = 0;
    double mse_axial = 0, mse_coronal = 0, mse_sagittal = 0;
};

struct CaseRecord {
    std::string id;
    std::string scan_path;
    std::string truth_path;
    bool ok = false;
    std::string error;
    std::string half_side;
    double threshold = 0.0;
    std::size_t positives = 0;             // detected voxels, full resolution
    std::array<std::array<int, 2>, 3> bbox{};  // SI/AP/LR, working-grid coords
    std::optional<CaseMetrics> metrics;
    std::map<std::string, double> timings_ms;
};

struct RunReport {
    nlohmann::ordered_json config;
    std::vector<CaseRecord> cases;  // sorted by case id
    std::map<std::string, CohortSummary> summary;
    std::string tool_version = kToolVersion;
    double wall_ms = 0.0;
};

// Detection half of the per-case flow, reusable without file I/O.
struct DetectionOutput {
    double threshold = 0.0;
    BinaryMask3 mask_working;   // morphologically smoothed, bbox grid
    BinaryMask3 mask_full;      // embedded at original resolution
};
DetectionOutput detect_mask(const PredictionResult& pred,
                            const DetectionParams& params,
                            std::array<int, 3> full_dims, int ds_factor);

// Prediction-quality metrics against a full-resolution truth mask.
CaseMetrics evaluate_case(const PredictionResult& pred, const BinaryMask3& mask_full,
                          const BinaryMask3& truth_full, const PipelineConfig& cfg);

CaseRecord run_case(const RunConfig& cfg, const CaseInput& input);
RunReport run_batch(const RunConfig& cfg, const std::vector<CaseInput>& inputs);

nlohmann::ordered_json report_to_json(const RunReport& report, bool stable);
std::string report_to_csv(const RunReport& report);

nlohmann::ordered_json config_to_json(const RunConfig& cfg);
void config_from_json(const nlohmann::json& j, RunConfig& cfg);

}  // namespace btd

#endif
