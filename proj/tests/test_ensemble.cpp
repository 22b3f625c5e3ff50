#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "adens/ensemble.hpp"
#include "adens/model_io.hpp"
#include "adens/rng.hpp"
#include "adens/simulate.hpp"

using namespace adens;

namespace {

// Closed-form R^2 for two predictors through the centered covariance algebra;
// an independent route from the normal-equations solver in the library.
double ols_r2_oracle(const std::vector<double>& x1, const std::vector<double>& x2,
                     const std::vector<double>& y) {
    std::size_t n = y.size();
    auto mean = [n](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m += e;
        return m / static_cast<double>(n);
    };
    double mx1 = mean(x1), mx2 = mean(x2), my = mean(y);
    double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = x1[i] - mx1, b = x2[i] - mx2, c = y[i] - my;
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
        s1y += a * c;
        s2y += b * c;
        syy += c * c;
    }
    double det = s11 * s22 - s12 * s12;
    double b1 = (s22 * s1y - s12 * s2y) / det;
    double b2 = (s11 * s2y - s12 * s1y) / det;
    return (b1 * s1y + b2 * s2y) / syy;
}

ScoreMatrix random_score_matrix(std::size_t n, std::uint64_t seed) {
    ScoreMatrix D;
    D.n_samples = n;
    D.k_detectors = 3;
    D.values.resize(n * 3);
    Rng rng(seed);
    for (double& v : D.values) v = rng.uniform(-1.0, 1.0);
    return D;
}

FeatureMatrix small_training_set(std::size_t n, std::uint64_t seed) {
    SimConfig cfg;
    cfg.n_records = n;
    cfg.anomaly_fraction = 0.0;
    cfg.rng_seed = seed;
    return simulate_tlight(cfg).features;
}

DetectorParams quick_params(std::uint64_t seed) {
    DetectorParams p;
    p.ocnn.epochs = 60;
    p.ocnn.rng_seed = derive_seed(seed, "ocnn");
    p.iforest.n_estimators = 50;
    p.iforest.rng_seed = derive_seed(seed, "iforest");
    return p;
}

}  // namespace

TEST_CASE("normalize_scores matches the affine endpoint examples") {
    FeatureRange r{0.0, 10.0};
    auto out = normalize_scores({0.0, 5.0, 10.0}, r);
    CHECK(out == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(normalize_scores({-4.0}, FeatureRange{-8.0, 10.0}) == std::vector<double>{-0.5});
    CHECK(normalize_scores({20.0}, FeatureRange{0.0, 10.0}) == std::vector<double>{1.0});
    // degenerate all-zero range
    CHECK(normalize_scores({0.0, 0.0}, FeatureRange{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("normalize_scores is sign-preserving, monotone, and bounded") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> raw(50);
        for (double& v : raw) v = rng.uniform(-20.0, 20.0);
        FeatureRange range = FeatureRange::from_scores(raw);
        auto norm = normalize_scores(raw, range);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            CHECK(norm[i] >= -1.0);
            CHECK(norm[i] <= 1.0);
            if (raw[i] > 0.0) CHECK(norm[i] >= 0.0);
            if (raw[i] < 0.0) CHECK(norm[i] <= 0.0);
            if (raw[i] == 0.0) CHECK(norm[i] == 0.0);
        }
        // monotone on the raw inputs
        for (std::size_t i = 0; i < raw.size(); ++i)
            for (std::size_t j = i + 1; j < raw.size(); ++j)
                if (raw[i] < raw[j]) CHECK(norm[i] <= norm[j]);
        // re-normalizing the training vector with the persisted range is bit-exact
        CHECK(normalize_scores(raw, range) == norm);
    }
}

TEST_CASE("majority vote sign matches the mode oracle on all sign patterns") {
    for (int mask = 0; mask < 8; ++mask) {
        std::array<double, 3> row;
        int positives = 0;
        for (int k = 0; k < 3; ++k) {
            bool pos = mask & (1 << k);
            row[k] = pos ? 0.5 : -0.5;
            positives += pos;
        }
        double s = vote_majority(row);
        bool expect_normal = positives >= 2;  // brute-force mode
        CHECK((s >= 0.0) == expect_normal);
    }
    CHECK(vote_majority(std::array<double, 3>{1.0, 1.0, -1.0}) > 0.0);
    CHECK(vote_majority(std::array<double, 3>{-0.5, -0.1, 0.9}) < 0.0);
}

TEST_CASE("voting functions match brute-force oracles on random triples") {
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        std::array<double, 3> row, w;
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
        for (double& v : w) v = rng.uniform(0.0, 1.0);

        double mx = std::max({row[0], row[1], row[2]});
        CHECK(vote_max(row) == mx);

        double mean = (row[0] + row[1] + row[2]) / 3.0;
        CHECK_THAT(vote_soft(row), Catch::Matchers::WithinAbs(mean, 1e-15));

        double wmax = std::max({w[0] * row[0], w[1] * row[1], w[2] * row[2]});
        CHECK(vote_weighted(row, w) == wmax);

        int neg = (row[0] < 0) + (row[1] < 0) + (row[2] < 0);
        CHECK((vote_majority(row) >= 0.0) == (neg < 2));
    }
}

TEST_CASE("voting boundary cases follow the zero-is-normal convention") {
    CHECK(vote_max(std::array<double, 3>{-1.0, -1.0, -1.0}) == -1.0);
    CHECK(vote_max(std::array<double, 3>{-0.9, 0.0, -0.2}) == 0.0);
    CHECK_THAT(vote_soft(std::array<double, 3>{-0.3, -0.3, 0.6}),
               Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK(vote_soft(std::array<double, 3>{1.0, 1.0, 1.0}) == 1.0);
    CHECK(vote_weighted(std::array<double, 3>{-0.4, 0.7, 0.2},
                        std::array<double, 3>{0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("learn_weights OLS matches the closed-form R^2 oracle") {
    VotingStrategy strategy;
    strategy.kind = StrategyKind::WEIGHTED;
    strategy.weight_learner = WeightLearner::OLS;
    for (std::uint64_t seed : {100u, 101u, 102u, 103u, 104u}) {
        ScoreMatrix D = random_score_matrix(200, seed);
        auto weights = learn_weights(D, strategy);
        for (std::size_t col = 0; col < 3; ++col) {
            auto y = D.column(col);
            auto x1 = D.column((col + 1) % 3);
            auto x2 = D.column((col + 2) % 3);
            double r2 = std::clamp(ols_r2_oracle(x1, x2, y), 0.0, 1.0);
            CHECK_THAT(weights[col], Catch::Matchers::WithinAbs(r2, 1e-9));
        }
    }
}

TEST_CASE("duplicated and constant columns get weights 1 and 0") {
    ScoreMatrix D = random_score_matrix(100, 7);
    for (std::size_t i = 0; i < D.n_samples; ++i) {
        D.values[i * 3 + 1] = D.values[i * 3 + 0];  // column 1 duplicates column 0
        D.values[i * 3 + 2] = 0.25;                 // column 2 constant
    }
    VotingStrategy strategy;
    strategy.kind = StrategyKind::WEIGHTED;
    strategy.weight_learner = WeightLearner::OLS;
    auto weights = learn_weights(D, strategy);
    CHECK_THAT(weights[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(weights[1], Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(weights[2] == 0.0);
}

TEST_CASE("an independent-noise column gets the lowest OLS weight") {
    ScoreMatrix D;
    D.n_samples = 200;
    D.k_detectors = 3;
    D.values.resize(600);
    Rng rng(23);
    for (std::size_t i = 0; i < 200; ++i) {
        double base = rng.uniform(-1.0, 1.0);
        D.values[i * 3 + 0] = base;
        D.values[i * 3 + 1] = 0.9 * base + 0.05 * rng.uniform(-1.0, 1.0);
        D.values[i * 3 + 2] = rng.uniform(-1.0, 1.0);  // independent noise
    }
    VotingStrategy strategy;
    strategy.kind = StrategyKind::WEIGHTED;
    strategy.weight_learner = WeightLearner::OLS;
    auto weights = learn_weights(D, strategy);
    CHECK(weights[2] < weights[0]);
    CHECK(weights[2] < weights[1]);
}

TEST_CASE("rmse learner weight is max(0, 1-RMSE) of the same linear fit") {
    ScoreMatrix D = random_score_matrix(150, 9);
    VotingStrategy rmse_strategy;
    rmse_strategy.kind = StrategyKind::WEIGHTED;
    rmse_strategy.weight_learner = WeightLearner::RMSE;
    auto weights = learn_weights(D, rmse_strategy);
    for (std::size_t col = 0; col < 3; ++col) {
        auto y = D.column(col);
        std::vector<double> predictors(D.n_samples * 2);
        for (std::size_t i = 0; i < D.n_samples; ++i) {
            std::size_t out = 0;
            for (std::size_t c = 0; c < 3; ++c)
                if (c != col) predictors[i * 2 + out++] = D.at(i, c);
        }
        FitQuality q = linear_fit_quality(predictors, y, 2);
        CHECK_THAT(weights[col], Catch::Matchers::WithinAbs(std::max(0.0, 1.0 - q.rmse), 1e-12));
    }
}

TEST_CASE("learn_weights rejects matrices with fewer than 2 rows") {
    ScoreMatrix D;
    D.n_samples = 1;
    D.k_detectors = 3;
    D.values = {0.1, 0.2, 0.3};
    VotingStrategy strategy;
    strategy.kind = StrategyKind::WEIGHTED;
    CHECK_THROWS_AS(learn_weights(D, strategy), DegenerateMatrix);
}

TEST_CASE("learn_weights is invariant under row permutation") {
    ScoreMatrix D = random_score_matrix(80, 33);
    ScoreMatrix reversed = D;
    for (std::size_t i = 0; i < D.n_samples; ++i)
        for (std::size_t k = 0; k < 3; ++k)
            reversed.values[i * 3 + k] = D.at(D.n_samples - 1 - i, k);
    VotingStrategy strategy;
    strategy.kind = StrategyKind::WEIGHTED;
    strategy.weight_learner = WeightLearner::OLS;
    auto wa = learn_weights(D, strategy);
    auto wb = learn_weights(reversed, strategy);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK_THAT(wa[k], Catch::Matchers::WithinAbs(wb[k], 1e-12));
}

TEST_CASE("stacking meta-detector behaves on concentrated score rows") {
    // training D concentrated near (+0.5, +0.5, +0.5)
    FeatureMatrix D;
    D.n_samples = 600;
    D.n_features = 3;
    D.feature_names = {"s0", "s1", "s2"};
    Rng rng(44);
    D.values.resize(600 * 3);
    for (double& v : D.values) v = 0.5 + 0.02 * rng.uniform(-1.0, 1.0);
    IforestParams params;
    params.rng_seed = 44;
    IforestModel meta = fit_iforest(D, params);

    // in-distribution row is normal, the far corner is anomalous
    double in_row[3] = {0.5, 0.5, 0.5};
    CHECK(meta.score_row(in_row, 3) >= 0.0);
    double corner[3] = {-1.0, -1.0, -1.0};
    CHECK(meta.score_row(corner, 3) < 0.0);

    // meta trained with contamination 0.007 flags at most 2% of its own rows
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < D.n_samples; ++i)
        flagged += meta.score_row(D.row(i), 3) < 0.0;
    CHECK(static_cast<double>(flagged) <= 0.02 * static_cast<double>(D.n_samples));
}

TEST_CASE("fit_ensemble wires strategy state per kind") {
    FeatureMatrix train = small_training_set(400, 1);
    BaseStack base = fit_base_stack(train, quick_params(1));

    VotingStrategy weighted;
    weighted.kind = StrategyKind::WEIGHTED;
    weighted.weight_learner = WeightLearner::KNN;
    EnsembleModel wmodel = fit_strategy(base, weighted);
    REQUIRE(wmodel.weights.size() == 3);
    for (double w : wmodel.weights) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }

    VotingStrategy stacking;
    stacking.kind = StrategyKind::STACKING;
    EnsembleModel smodel = fit_strategy(base, stacking);
    CHECK(smodel.meta.feature_count == 3);
    CHECK(smodel.meta.params.n_estimators == 100);
    CHECK(smodel.meta.params.max_samples == 256);
    CHECK(smodel.meta.params.contamination == 0.007);
}

TEST_CASE("predict_ensemble labels come from thresholding the final scores") {
    FeatureMatrix train = small_training_set(400, 2);
    SimConfig cfg;
    cfg.n_records = 300;
    cfg.anomaly_fraction = 0.2;
    cfg.rng_seed = 5;
    LabeledSet test = simulate_tlight(cfg);

    BaseStack base = fit_base_stack(train, quick_params(2));
    for (StrategyKind kind : {StrategyKind::MAJORITY, StrategyKind::MAXSCORE, StrategyKind::SOFT,
                              StrategyKind::WEIGHTED, StrategyKind::STACKING}) {
        VotingStrategy strategy;
        strategy.kind = kind;
        EnsembleModel model = fit_strategy(base, strategy);
        auto pred = predict_ensemble(model, test.features);
        REQUIRE(pred.labels.size() == test.size());
        for (std::size_t i = 0; i < pred.labels.size(); ++i)
            CHECK((pred.labels[i] == Label::anomaly) == (pred.final_scores[i] < 0.0));
    }
}

TEST_CASE("weighted voting with unit weights equals max-score labels") {
    FeatureMatrix train = small_training_set(300, 3);
    BaseStack base = fit_base_stack(train, quick_params(3));
    VotingStrategy maxs;
    maxs.kind = StrategyKind::MAXSCORE;
    EnsembleModel mmodel = fit_strategy(base, maxs);
    VotingStrategy weighted;
    weighted.kind = StrategyKind::WEIGHTED;
    EnsembleModel wmodel = fit_strategy(base, weighted);
    wmodel.weights = {1.0, 1.0, 1.0};

    SimConfig cfg;
    cfg.n_records = 200;
    cfg.anomaly_fraction = 0.3;
    cfg.rng_seed = 6;
    LabeledSet test = simulate_tlight(cfg);
    auto mp = predict_ensemble(mmodel, test.features);
    auto wp = predict_ensemble(wmodel, test.features);
    CHECK(mp.labels == wp.labels);
}

TEST_CASE("majority label depends only on score signs") {
    Rng rng(71);
    for (int trial = 0; trial < 500; ++trial) {
        std::array<double, 3> row, scaled;
        for (std::size_t k = 0; k < 3; ++k) {
            row[k] = rng.uniform(-1.0, 1.0);
            scaled[k] = row[k] * rng.uniform(0.05, 5.0);
        }
        CHECK((vote_majority(row) >= 0.0) == (vote_majority(scaled) >= 0.0));
    }
}

TEST_CASE("ensemble serialization round-trips predictions bit-exactly") {
    FeatureMatrix train = small_training_set(350, 4);
    SimConfig cfg;
    cfg.n_records = 250;
    cfg.anomaly_fraction = 0.25;
    cfg.rng_seed = 8;
    LabeledSet test = simulate_tlight(cfg);

    BaseStack base = fit_base_stack(train, quick_params(4));
    for (StrategyKind kind : {StrategyKind::MAJORITY, StrategyKind::MAXSCORE, StrategyKind::SOFT,
                              StrategyKind::WEIGHTED, StrategyKind::STACKING}) {
        VotingStrategy strategy;
        strategy.kind = kind;
        EnsembleModel model = fit_strategy(base, strategy);
        std::string doc = serialize_ensemble(model);
        EnsembleModel back = deserialize_ensemble(doc);
        auto a = predict_ensemble(model, test.features);
        auto b = predict_ensemble(back, test.features);
        CHECK(a.final_scores == b.final_scores);
        CHECK(a.labels == b.labels);
        // and the document itself is byte-stable
        CHECK(serialize_ensemble(back) == doc);
    }
}

TEST_CASE("fixed seeds give byte-identical ensemble serialization") {
    FeatureMatrix train = small_training_set(300, 9);
    VotingStrategy strategy;
    strategy.kind = StrategyKind::STACKING;
    strategy.meta_params.rng_seed = 5;
    EnsembleModel a = fit_ensemble(train, strategy, quick_params(9));
    EnsembleModel b = fit_ensemble(train, strategy, quick_params(9));
    CHECK(serialize_ensemble(a) == serialize_ensemble(b));
}
