#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "adens/core.hpp"
#include "adens/detector.hpp"
#include "adens/normalize.hpp"
#include "adens/voting.hpp"

namespace adens {

constexpr std::size_t kNumDetectors = 3;

struct DetectorParams {
    OcsvmParams ocsvm;
    OcnnParams ocnn;
    IforestParams iforest;
};

/// Fitted base detectors plus their persisted score ranges; shared by every
/// voting strategy fitted on the same training set.
struct BaseStack {
    std::array<TrainedDetector, kNumDetectors> detectors;
    std::array<FeatureRange, kNumDetectors> ranges;
    ScoreMatrix train_scores;  // normalized training ScoreMatrix D

    ScoreMatrix score_matrix(const FeatureMatrix& data) const {
        ScoreMatrix sm;
        sm.n_samples = data.n_samples;
        sm.k_detectors = kNumDetectors;
        sm.values.resize(data.n_samples * kNumDetectors);
        for (std::size_t k = 0; k < kNumDetectors; ++k) {
            std::vector<double> raw = detectors[k].score(data);
            for (std::size_t i = 0; i < data.n_samples; ++i)
                sm.values[i * kNumDetectors + k] = normalize_score(raw[i], ranges[k]);
        }
        return sm;
    }
};

inline BaseStack fit_base_stack(const FeatureMatrix& train, const DetectorParams& params = {}) {
    train.validate();
    BaseStack stack;
    stack.detectors[0] = TrainedDetector(fit_ocsvm(train, params.ocsvm));
    stack.detectors[1] = TrainedDetector(fit_ocnn(train, params.ocnn));
    stack.detectors[2] = TrainedDetector(fit_iforest(train, params.iforest));

    stack.train_scores.n_samples = train.n_samples;
    stack.train_scores.k_detectors = kNumDetectors;
    stack.train_scores.values.resize(train.n_samples * kNumDetectors);
    for (std::size_t k = 0; k < kNumDetectors; ++k) {
        std::vector<double> raw = stack.detectors[k].score(train);
        stack.ranges[k] = FeatureRange::from_scores(raw);
        for (std::size_t i = 0; i < train.n_samples; ++i)
            stack.train_scores.values[i * kNumDetectors + k] = normalize_score(raw[i], stack.ranges[k]);
    }
    return stack;
}

/// Fitted ensemble: base detectors, persisted ranges, and strategy state
/// (weights for WEIGHTED, a fitted meta isolation forest for STACKING).
struct EnsembleModel {
    BaseStack base;
    VotingStrategy strategy;
    std::vector<double> weights;  // WEIGHTED
    IforestModel meta;            // STACKING

    bool any_non_convergence() const {
        for (const auto& d : base.detectors)
            if (d.non_convergence()) return true;
        return false;
    }

    double vote_row(const double* row) const {
        std::span<const double> r(row, kNumDetectors);
        switch (strategy.kind) {
            case StrategyKind::MAJORITY: return vote_majority(r);
            case StrategyKind::MAXSCORE: return vote_max(r);
            case StrategyKind::SOFT: return vote_soft(r);
            case StrategyKind::WEIGHTED: return vote_weighted(r, weights);
            case StrategyKind::STACKING: return vote_stacking(r, meta);
        }
        throw InvalidParams("ensemble: unknown strategy");
    }
};

/// Attaches a voting strategy to an already-fitted base stack.
inline EnsembleModel fit_strategy(BaseStack base, const VotingStrategy& strategy) {
    strategy.validate();
    EnsembleModel model;
    model.base = std::move(base);
    model.strategy = strategy;
    if (strategy.kind == StrategyKind::WEIGHTED)
        model.weights = learn_weights(model.base.train_scores, strategy);
    else if (strategy.kind == StrategyKind::STACKING)
        model.meta = fit_iforest(model.base.train_scores.as_features(), strategy.meta_params);
    return model;
}

inline EnsembleModel fit_ensemble(const FeatureMatrix& train, const VotingStrategy& strategy,
                                  const DetectorParams& params = {}) {
    return fit_strategy(fit_base_stack(train, params), strategy);
}

struct EnsemblePrediction {
    std::vector<Label> labels;
    std::vector<double> final_scores;
};

/// Scores each detector, normalizes with the persisted ranges, applies the
/// voting function; anomaly iff the final score is negative.
inline EnsemblePrediction predict_ensemble(const EnsembleModel& model, const FeatureMatrix& data) {
    ScoreMatrix sm = model.base.score_matrix(data);
    EnsemblePrediction pred;
    pred.labels.reserve(data.n_samples);
    pred.final_scores.reserve(data.n_samples);
    for (std::size_t i = 0; i < data.n_samples; ++i) {
        double s = model.vote_row(sm.row(i));
        pred.final_scores.push_back(s);
        pred.labels.push_back(s >= 0.0 ? Label::normal : Label::anomaly);
    }
    return pred;
}

}  // namespace adens
