#ifndef BTD_METRICS_HPP
#define BTD_METRICS_HPP

#include <span>

#include "btd/detection.hpp"

namespace btd {

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct DetectionScores {
    ConfusionCounts counts;
    double dice = 0.0;
    double sensitivity = 0.0;
    double fdr = 0.0;
};

struct SSIMParams {
    double exp_l = 1.0, exp_c = 1.0, exp_s = 1.0;
    double c1 = 1e-4, c2 = 1e-4, c3 = 1e-4;
};

struct CohortSummary {
    double mean = 0.0, median = 0.0, q25 = 0.0, q75 = 0.0;
};

// Voxel-agreement confusion counts plus Dice, sensitivity and FDR.
// Two empty masks agree perfectly: dice 1, sensitivity 1, fdr 0.
DetectionScores confusion_metrics(const BinaryMask3& pred, const BinaryMask3& truth);

// Global-statistics SSIM over the flattened matrices; both histograms are
// normalized to unit total mass first so shapes are compared, not counts.
double ssim2d(const Histogram2D& x, const Histogram2D& y, const SSIMParams& p = {});
double ssim_flat(std::span<const double> x, std::span<const double> y,
                 const SSIMParams& p = {});

// Pearson correlation and mean squared error of the unit-mass-normalized
// flattened matrices.  cc is NaN when either side has zero variance.
struct SimilarityScores {
    double cc = 0.0;
    double mse = 0.0;
};
SimilarityScores similarity_scores(const Histogram2D& x, const Histogram2D& y);

// Mean, median and quartiles (linear interpolation between order
// statistics).
CohortSummary summarize(std::span<const double> values);

}  // namespace btd

#endif
