#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include "adens/core.hpp"
#include "adens/detector.hpp"
#include "adens/iforest.hpp"
#include "adens/normalize.hpp"
#include "adens/regress.hpp"

namespace adens {

enum class WeightLearner { RMSE, OLS, RIDGE, KNN };

inline std::string to_string(WeightLearner w) {
    switch (w) {
        case WeightLearner::RMSE: return "rmse";
        case WeightLearner::OLS: return "ols";
        case WeightLearner::RIDGE: return "ridge";
        case WeightLearner::KNN: return "knn";
    }
    return "?";
}

enum class StrategyKind { MAJORITY, MAXSCORE, SOFT, WEIGHTED, STACKING };

inline std::string to_string(StrategyKind s) {
    switch (s) {
        case StrategyKind::MAJORITY: return "majority";
        case StrategyKind::MAXSCORE: return "max";
        case StrategyKind::SOFT: return "soft";
        case StrategyKind::WEIGHTED: return "weighted";
        case StrategyKind::STACKING: return "stacking";
    }
    return "?";
}

struct VotingStrategy {
    StrategyKind kind = StrategyKind::MAJORITY;
    // WEIGHTED only
    WeightLearner weight_learner = WeightLearner::OLS;
    double ridge_lambda = 1.0;
    std::size_t knn_k = 5;
    // STACKING only
    IforestParams meta_params;

    void validate() const {
        if (kind == StrategyKind::WEIGHTED) {
            if (ridge_lambda < 0.0) throw InvalidParams("voting: ridge_lambda must be >= 0");
            if (knn_k < 1) throw InvalidParams("voting: knn k must be >= 1");
        }
        if (kind == StrategyKind::STACKING) meta_params.validate();
    }
};

/// Majority vote: sign is the mode of the entry signs (zero counts as a normal
/// vote); magnitude is the mean of the entries on the majority side so that
/// confidence histograms have something to show.
inline double vote_majority(std::span<const double> row) {
    std::size_t normal = 0, anomalous = 0;
    for (double v : row) (v >= 0.0 ? normal : anomalous)++;
    bool majority_normal = normal >= anomalous;
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : row) {
        if ((v >= 0.0) == majority_normal) {
            sum += v;
            ++count;
        }
    }
    double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
    // the mean of same-signed entries carries the majority sign already, except
    // for an all-zero majority side which stays at 0 (normal)
    return mean;
}

/// Maximum decision score over the detectors.
inline double vote_max(std::span<const double> row) {
    double best = row[0];
    for (double v : row) best = std::max(best, v);
    return best;
}

/// Arithmetic mean of the detector scores.
inline double vote_soft(std::span<const double> row) {
    double sum = 0.0;
    for (double v : row) sum += v;
    return sum / static_cast<double>(row.size());
}

/// Maximum of the weight-scaled scores.
inline double vote_weighted(std::span<const double> row, std::span<const double> weights) {
    double best = weights[0] * row[0];
    for (std::size_t k = 1; k < row.size(); ++k) best = std::max(best, weights[k] * row[k]);
    return best;
}

/// Signed score of the isolation-forest meta-detector on the normalized row.
inline double vote_stacking(std::span<const double> row, const IforestModel& meta) {
    return meta.score_row(row.data(), row.size());
}

/// Per-column voting weights: fit the learner to predict each column from the
/// other columns (in-sample) and turn fit quality into a weight in [0, 1].
/// OLS/RIDGE/KNN use clamp(R^2, 0, 1); RMSE uses max(0, 1 - RMSE) of the same
/// linear fit. Constant columns get weight 0.
inline std::vector<double> learn_weights(const ScoreMatrix& D, const VotingStrategy& strategy) {
    if (D.n_samples < 2) throw DegenerateMatrix("learn_weights: need at least 2 samples");
    std::size_t k = D.k_detectors;
    std::vector<double> weights(k, 0.0);
    std::vector<double> target(D.n_samples), predictors(D.n_samples * (k - 1));
    for (std::size_t col = 0; col < k; ++col) {
        for (std::size_t i = 0; i < D.n_samples; ++i) {
            target[i] = D.at(i, col);
            std::size_t out = 0;
            for (std::size_t c = 0; c < k; ++c)
                if (c != col) predictors[i * (k - 1) + out++] = D.at(i, c);
        }
        double lo = *std::min_element(target.begin(), target.end());
        double hi = *std::max_element(target.begin(), target.end());
        if (hi == lo) {
            weights[col] = 0.0;  // zero-variance guard
            continue;
        }
        FitQuality q;
        switch (strategy.weight_learner) {
            case WeightLearner::RMSE:
                q = linear_fit_quality(predictors, target, k - 1);
                weights[col] = std::max(0.0, 1.0 - q.rmse);
                continue;
            case WeightLearner::OLS:
                q = linear_fit_quality(predictors, target, k - 1);
                break;
            case WeightLearner::RIDGE:
                q = linear_fit_quality(predictors, target, k - 1, strategy.ridge_lambda);
                break;
            case WeightLearner::KNN:
                q = knn_fit_quality(predictors, target, k - 1, strategy.knn_k);
                break;
        }
        weights[col] = std::clamp(q.r2, 0.0, 1.0);
    }
    return weights;
}

}  // namespace adens
