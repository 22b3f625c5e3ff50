#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "adens/core.hpp"

namespace adens {

/// Confusion counts with the positive class = normal: tp = normal predicted
/// normal, tn = anomaly predicted anomaly, fp = anomaly predicted normal
/// (a missed anomaly), fn = normal predicted anomaly.
struct ConfusionCounts {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
};

inline ConfusionCounts confusion(const std::vector<Label>& truth,
                                 const std::vector<Label>& predicted) {
    if (truth.size() != predicted.size())
        throw LengthMismatch("confusion: label vectors differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::normal)
            (predicted[i] == Label::normal ? c.tp : c.fn)++;
        else
            (predicted[i] == Label::anomaly ? c.tn : c.fp)++;
    }
    return c;
}

/// Support-weighted per-class precision/recall/F1 plus plain accuracy. Ratios
/// with a zero denominator are reported as 0 and flagged.
struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool undefined_ratio = false;
};

inline MetricsReport metrics(const ConfusionCounts& c) {
    std::size_t n = c.total();
    if (n < 1) throw InvalidParams("metrics: empty confusion counts");
    MetricsReport r;
    r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);

    auto ratio = [&r](std::size_t num, std::size_t den) {
        if (den == 0) {
            r.undefined_ratio = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    double support_norm = static_cast<double>(c.tp + c.fn);
    double support_anom = static_cast<double>(c.tn + c.fp);

    double prec_norm = ratio(c.tp, c.tp + c.fp);
    double prec_anom = ratio(c.tn, c.tn + c.fn);
    double rec_norm = ratio(c.tp, c.tp + c.fn);
    double rec_anom = ratio(c.tn, c.tn + c.fp);
    auto f1_of = [](double p, double rec) { return p + rec > 0.0 ? 2.0 * p * rec / (p + rec) : 0.0; };
    double f1_norm = f1_of(prec_norm, rec_norm);
    double f1_anom = f1_of(prec_anom, rec_anom);

    double total = static_cast<double>(n);
    r.precision = (support_norm * prec_norm + support_anom * prec_anom) / total;
    r.recall = (support_norm * rec_norm + support_anom * rec_anom) / total;
    r.f1 = (support_norm * f1_norm + support_anom * f1_anom) / total;
    return r;
}

/// Per-outcome score histograms over [-1, 1], each nonempty outcome normalized
/// to percentages summing to 100.
struct HistogramExport {
    std::size_t n_bins = 0;
    std::vector<double> edges;                     // n_bins + 1 ascending edges
    std::array<std::vector<double>, 4> frequency;  // TP, TN, FP, FN percentages
    std::array<std::size_t, 4> stream_counts{};

    static constexpr std::array<const char*, 4> stream_names = {"TP", "TN", "FP", "FN"};
};

inline HistogramExport histogram_export(const std::vector<double>& final_scores,
                                        const std::vector<Label>& truth,
                                        const std::vector<Label>& predicted,
                                        std::size_t n_bins = 20) {
    if (truth.size() != predicted.size() || truth.size() != final_scores.size())
        throw LengthMismatch("histogram: input vectors differ in length");
    if (n_bins < 2) throw InvalidParams("histogram: need at least 2 bins");

    HistogramExport h;
    h.n_bins = n_bins;
    for (std::size_t b = 0; b <= n_bins; ++b)
        h.edges.push_back(-1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(n_bins));
    for (auto& f : h.frequency) f.assign(n_bins, 0.0);

    for (std::size_t i = 0; i < truth.size(); ++i) {
        std::size_t stream;
        if (truth[i] == Label::normal)
            stream = predicted[i] == Label::normal ? 0 : 3;  // TP or FN
        else
            stream = predicted[i] == Label::anomaly ? 1 : 2;  // TN or FP
        double s = std::clamp(final_scores[i], -1.0, 1.0);
        auto bin = static_cast<std::size_t>((s + 1.0) / 2.0 * static_cast<double>(n_bins));
        if (bin >= n_bins) bin = n_bins - 1;  // score exactly 1.0
        h.frequency[stream][bin] += 1.0;
        h.stream_counts[stream]++;
    }
    for (std::size_t s = 0; s < 4; ++s) {
        if (h.stream_counts[s] == 0) continue;
        for (double& f : h.frequency[s]) f *= 100.0 / static_cast<double>(h.stream_counts[s]);
    }
    return h;
}

}  // namespace adens
