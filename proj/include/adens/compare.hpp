#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "adens/anova.hpp"
#include "adens/ensemble.hpp"
#include "adens/metrics.hpp"
#include "adens/simulate.hpp"

namespace adens {

struct ModelSummary {
    std::string name;
    double mean_accuracy = 0.0, std_accuracy = 0.0;
    double mean_precision = 0.0, std_precision = 0.0;
    double mean_recall = 0.0, std_recall = 0.0;
    double mean_f1 = 0.0, std_f1 = 0.0;
};

struct ComparisonResult {
    std::vector<ModelSummary> summaries;
    std::vector<std::vector<double>> f1_samples;  // per model, resamples x specs values
    AnovaResult anova;
};

namespace compare_detail {

inline void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace compare_detail

/// Evaluates each model on `resamples` fresh replicates of each canonical
/// test-set spec and compares the models' F1 samples with one-way ANOVA.
/// The replicate for (spec, resample) is identical across models.
inline ComparisonResult compare_models(
    const std::vector<EnsembleModel>& models, const std::vector<std::string>& names,
    std::size_t resamples, std::uint64_t rng_seed,
    std::vector<TestSetSpec> specs = {}) {
    if (models.size() < 2) throw InvalidParams("compare: need at least 2 models");
    if (resamples < 2) throw InvalidParams("compare: need at least 2 resamples");
    if (names.size() != models.size()) throw LengthMismatch("compare: one name per model");
    if (specs.empty())
        specs.assign(paper_test_specs().begin(), paper_test_specs().end());

    ComparisonResult out;
    out.f1_samples.resize(models.size());
    std::vector<std::vector<double>> acc(models.size()), prec(models.size()), rec(models.size());

    for (std::size_t t = 0; t < specs.size(); ++t) {
        for (std::size_t rep = 0; rep < resamples; ++rep) {
            SimConfig cfg;
            cfg.n_records = specs[t].n_records;
            cfg.anomaly_fraction = specs[t].anomaly_fraction;
            cfg.scenario_mix = scenario_mix_for(specs[t].timing_heavy);
            cfg.rng_seed = derive_seed(rng_seed, "compare-spec" + std::to_string(t + 1) + "-rep" +
                                                     std::to_string(rep));
            LabeledSet replicate = simulate_tlight(cfg);
            for (std::size_t m = 0; m < models.size(); ++m) {
                auto pred = predict_ensemble(models[m], replicate.features);
                MetricsReport rpt = metrics(confusion(replicate.labels, pred.labels));
                acc[m].push_back(rpt.accuracy);
                prec[m].push_back(rpt.precision);
                rec[m].push_back(rpt.recall);
                out.f1_samples[m].push_back(rpt.f1);
            }
        }
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
        ModelSummary s;
        s.name = names[m];
        compare_detail::mean_std(acc[m], s.mean_accuracy, s.std_accuracy);
        compare_detail::mean_std(prec[m], s.mean_precision, s.std_precision);
        compare_detail::mean_std(rec[m], s.mean_recall, s.std_recall);
        compare_detail::mean_std(out.f1_samples[m], s.mean_f1, s.std_f1);
        out.summaries.push_back(std::move(s));
    }
    out.anova = anova_oneway(out.f1_samples);
    return out;
}

}  // namespace adens
