#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "adens/core.hpp"

namespace adens {

/// Persisted per-detector training-score range used to normalize test scores.
struct FeatureRange {
    double min = 0.0;
    double max = 0.0;

    static FeatureRange from_scores(const std::vector<double>& scores) {
        FeatureRange r;
        if (scores.empty()) return r;
        auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
        r.min = *lo;
        r.max = *hi;
        return r;
    }
};

/// Sign-preserving two-sided min-max: positive scores map onto [0,1] against
/// (0, max); negative scores map onto [-1,0) against (min, 0); zero stays zero.
/// Test-time scores beyond the training range clamp to [-1,1].
inline double normalize_score(double raw, const FeatureRange& range) {
    constexpr double eps = 1e-12;
    if (raw > 0.0) {
        double denom = std::max(range.max, eps);
        return std::min(raw / denom, 1.0);
    }
    if (raw < 0.0) {
        double denom = std::min(range.min, -eps);
        return std::max(-(raw / denom), -1.0);
    }
    return 0.0;
}

inline std::vector<double> normalize_scores(const std::vector<double>& raw,
                                            const FeatureRange& range) {
    if (range.max < range.min) throw InvalidParams("normalize: max < min");
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw) out.push_back(normalize_score(v, range));
    return out;
}

/// Normalized signed scores in [-1, 1]; column k comes from detector k.
struct ScoreMatrix {
    std::size_t n_samples = 0;
    std::size_t k_detectors = 0;
    std::vector<double> values;  // row-major

    double at(std::size_t row, std::size_t col) const {
        return values[row * k_detectors + col];
    }
    const double* row(std::size_t i) const { return values.data() + i * k_detectors; }

    std::vector<double> column(std::size_t k) const {
        std::vector<double> out(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) out[i] = at(i, k);
        return out;
    }

    FeatureMatrix as_features() const {
        FeatureMatrix fm;
        fm.n_samples = n_samples;
        fm.n_features = k_detectors;
        fm.values = values;
        for (std::size_t k = 0; k < k_detectors; ++k)
            fm.feature_names.push_back("s" + std::to_string(k));
        return fm;
    }
};

}  // namespace adens
