#include "btd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace btd {

DetectionScores confusion_metrics(const BinaryMask3& pred, const BinaryMask3& truth) {
    if (pred.dims() != truth.dims())
        throw InvalidArgument("confusion_metrics: mask dims mismatch");

    DetectionScores s;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.data[i] != 0;
        const bool t = truth.data[i] != 0;
        if (p && t)
            ++s.counts.tp;
        else if (p && !t)
            ++s.counts.fp;
        else if (!p && t)
            ++s.counts.fn;
        else
            ++s.counts.tn;
    }
    const double tp = static_cast<double>(s.counts.tp);
    const double fp = static_cast<double>(s.counts.fp);
    const double fn = static_cast<double>(s.counts.fn);
    s.dice = (tp + fp + fn) > 0 ? 2.0 * tp / (2.0 * tp + fp + fn) : 1.0;
    s.sensitivity = (tp + fn) > 0 ? tp / (tp + fn) : 1.0;
    s.fdr = (tp + fp) > 0 ? fp / (tp + fp) : 0.0;
    return s;
}

namespace {

std::vector<double> unit_mass(std::span<const double> v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    std::vector<double> out(v.begin(), v.end());
    if (total > 0.0)
        for (double& x : out) x /= total;
    return out;
}

struct Moments {
    double mean_x, mean_y, var_x, var_y, cov;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double vx = 0.0, vy = 0.0, cv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        vx += dx * dx;
        vy += dy * dy;
        cv += dx * dy;
    }
    vx /= n;
    vy /= n;
    cv /= n;
    return {mx, my, vx, vy, cv};
}

}  // namespace

double ssim_flat(std::span<const double> x, std::span<const double> y,
                 const SSIMParams& p) {
    if (x.size() != y.size() || x.empty())
        throw InvalidArgument("ssim: size mismatch or empty input");
    const auto m = moments(x, y);
    const double sx = std::sqrt(m.var_x), sy = std::sqrt(m.var_y);
    const double l = (2.0 * m.mean_x * m.mean_y + p.c1) /
                     (m.mean_x * m.mean_x + m.mean_y * m.mean_y + p.c1);
    const double c = (2.0 * sx * sy + p.c2) / (m.var_x + m.var_y + p.c2);
    const double s = (m.cov + p.c3) / (sx * sy + p.c3);
    auto powi = [](double b, double e) {
        return e == 1.0 ? b : std::copysign(std::pow(std::fabs(b), e), b);
    };
    return powi(l, p.exp_l) * powi(c, p.exp_c) * powi(s, p.exp_s);
}

double ssim2d(const Histogram2D& x, const Histogram2D& y, const SSIMParams& p) {
    if (x.bins != y.bins || x.n_slices != y.n_slices)
        throw InvalidArgument("ssim2d: histogram shape mismatch");
    const auto xn = unit_mass(x.counts);
    const auto yn = unit_mass(y.counts);
    return ssim_flat(xn, yn, p);
}

SimilarityScores similarity_scores(const Histogram2D& x, const Histogram2D& y) {
    if (x.bins != y.bins || x.n_slices != y.n_slices)
        throw InvalidArgument("similarity_scores: histogram shape mismatch");
    const auto xn = unit_mass(x.counts);
    const auto yn = unit_mass(y.counts);
    const auto m = moments(xn, yn);

    SimilarityScores s;
    if (m.var_x > 0.0 && m.var_y > 0.0)
        s.cc = m.cov / std::sqrt(m.var_x * m.var_y);
    else
        s.cc = std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) {
        const double d = xn[i] - yn[i];
        acc += d * d;
    }
    s.mse = acc / static_cast<double>(xn.size());
    return s;
}

CohortSummary summarize(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("summarize: empty sequence");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto quantile = [&v](double p) {
        const double h = p * static_cast<double>(v.size() - 1);
        const std::size_t k = static_cast<std::size_t>(std::floor(h));
        if (k + 1 >= v.size()) return v.back();
        return v[k] + (h - k) * (v[k + 1] - v[k]);
    };
    CohortSummary s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    s.median = quantile(0.5);
    s.q25 = quantile(0.25);
    s.q75 = quantile(0.75);
    return s;
}

}  // namespace btd
