#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "adens/detector.hpp"
#include "adens/rng.hpp"

using namespace adens;

namespace {

FeatureMatrix gaussian_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    FeatureMatrix fm;
    fm.n_samples = n;
    fm.n_features = d;
    for (std::size_t j = 0; j < d; ++j) fm.feature_names.push_back("x" + std::to_string(j));
    Rng rng(seed);
    fm.values.resize(n * d);
    for (double& v : fm.values) v = rng.gaussian();
    return fm;
}

// Independent density oracle: rank of the Gaussian-kernel density estimate of a
// query among the training points' own density estimates.
double kde_rank(const FeatureMatrix& train, const double* query) {
    auto density = [&](const double* x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < train.n_samples; ++i) {
            double d2 = 0.0;
            for (std::size_t f = 0; f < train.n_features; ++f) {
                double d = x[f] - train.at(i, f);
                d2 += d * d;
            }
            sum += std::exp(-0.5 * d2);
        }
        return sum;
    };
    double q = density(query);
    std::size_t below = 0;
    for (std::size_t i = 0; i < train.n_samples; ++i)
        if (density(train.row(i)) < q) ++below;
    return static_cast<double>(below) / static_cast<double>(train.n_samples);
}

double negative_fraction(const std::vector<double>& scores) {
    std::size_t neg = 0;
    for (double s : scores) neg += s < 0.0;
    return static_cast<double>(neg) / static_cast<double>(scores.size());
}

}  // namespace

TEST_CASE("ocsvm scores the center of a degenerate cluster as normal") {
    FeatureMatrix fm;
    fm.n_samples = 50;
    fm.n_features = 2;
    fm.feature_names = {"a", "b"};
    fm.values.assign(100, 0.5);
    OcsvmModel model = fit_ocsvm(fm);
    double x[2] = {0.5, 0.5};
    CHECK(model.score_row(x, 2) >= 0.0);
}

TEST_CASE("ocsvm flags a far outlier that the density oracle also rejects") {
    FeatureMatrix train = gaussian_cloud(200, 2, 101);
    double outlier[2] = {25.0, 25.0};
    // oracle: the outlier's density rank lies below the nu-quantile
    REQUIRE(kde_rank(train, outlier) < 0.05);
    OcsvmParams params;
    params.nu = 0.05;
    OcsvmModel model = fit_ocsvm(train, params);
    CHECK(model.score_row(outlier, 2) < 0.0);
}

TEST_CASE("ocsvm respects the nu bound on training outliers") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        FeatureMatrix train = gaussian_cloud(300, 3, seed);
        OcsvmParams params;
        params.nu = 0.1;
        OcsvmModel model = fit_ocsvm(train, params);
        CHECK(negative_fraction(model.score(train)) <= params.nu + 0.02);
    }
}

TEST_CASE("ocsvm duals stay inside the box and duplicated rows score alike") {
    FeatureMatrix train = gaussian_cloud(150, 2, 8);
    OcsvmParams params;
    params.nu = 0.2;
    OcsvmModel model = fit_ocsvm(train, params);
    double cap = 1.0 / (params.nu * 150.0);
    for (double a : model.duals) {
        CHECK(a >= 0.0);
        CHECK(a <= cap + 1e-12);
    }
    CHECK(model.duals.size() <= 150);

    FeatureMatrix dup;
    dup.n_samples = 2;
    dup.n_features = 2;
    dup.feature_names = {"a", "b"};
    dup.values = {0.3, -0.2, 0.3, -0.2};
    auto scores = model.score(dup);
    CHECK(scores[0] == scores[1]);
}

TEST_CASE("ocsvm rejects mismatched feature counts at score time") {
    FeatureMatrix train = gaussian_cloud(50, 2, 3);
    OcsvmModel model = fit_ocsvm(train);
    double x[3] = {0, 0, 0};
    CHECK_THROWS_AS(model.score_row(x, 3), DimensionMismatch);
}

TEST_CASE("ocnn keeps roughly 1-nu of the training set on the normal side") {
    FeatureMatrix train = gaussian_cloud(400, 3, 21);
    OcnnParams params;
    params.nu = 0.05;
    params.rng_seed = 21;
    OcnnModel model = fit_ocnn(train, params);
    CHECK(negative_fraction(model.score(train)) <= params.nu + 0.05);
}

TEST_CASE("ocnn flags a far outlier") {
    FeatureMatrix train = gaussian_cloud(300, 2, 31);
    double outlier[2] = {25.0, 25.0};
    REQUIRE(kde_rank(train, outlier) < 0.05);
    OcnnParams params;
    params.rng_seed = 31;
    OcnnModel model = fit_ocnn(train, params);
    CHECK(model.score_row(outlier, 2) < 0.0);
}

TEST_CASE("ocnn training is bit-deterministic for a fixed seed") {
    FeatureMatrix train = gaussian_cloud(120, 2, 12);
    OcnnParams params;
    params.rng_seed = 99;
    params.epochs = 50;
    OcnnModel a = fit_ocnn(train, params);
    OcnnModel b = fit_ocnn(train, params);
    CHECK(a.hidden_weights == b.hidden_weights);
    CHECK(a.output_weights == b.output_weights);
    CHECK(a.r == b.r);
}

TEST_CASE("isolation forest path-length constant") {
    using iforest_detail::average_path_length;
    CHECK(average_path_length(2) == 1.0);
    // longhand harmonic oracle
    for (std::size_t n : {3u, 10u, 97u, 256u, 1000u}) {
        double h = 0.0;
        for (std::size_t k = 1; k <= n - 1; ++k) h += 1.0 / static_cast<double>(k);
        double expected = 2.0 * h - 2.0 * static_cast<double>(n - 1) / static_cast<double>(n);
        CHECK_THAT(average_path_length(n), Catch::Matchers::WithinAbs(expected, 1e-12));
    }
}

TEST_CASE("isolation forest default params match the published meta settings") {
    IforestParams params;
    CHECK(params.n_estimators == 100);
    CHECK(params.max_samples == 256);
    CHECK(params.contamination == 0.007);
}

TEST_CASE("isolation forest training negative fraction tracks contamination") {
    FeatureMatrix train = gaussian_cloud(600, 4, 41);
    IforestParams params;
    params.rng_seed = 41;
    IforestModel model = fit_iforest(train, params);
    double frac = negative_fraction(model.score(train));
    CHECK(frac <= params.contamination + 0.01);
}

TEST_CASE("isolation forest anomaly measure is in (0,1) and flags far outliers") {
    FeatureMatrix train = gaussian_cloud(500, 2, 51);
    IforestParams params;
    params.rng_seed = 51;
    IforestModel model = fit_iforest(train, params);
    for (std::size_t i = 0; i < 50; ++i) {
        double a = model.anomaly_measure_row(train.row(i), 2);
        CHECK(a > 0.0);
        CHECK(a < 1.0);
    }
    double outlier[2] = {25.0, 25.0};
    CHECK(model.score_row(outlier, 2) < 0.0);
}

TEST_CASE("isolation forest tree depth never exceeds the height limit") {
    FeatureMatrix train = gaussian_cloud(400, 3, 61);
    IforestParams params;
    params.max_samples = 64;
    params.rng_seed = 61;
    IforestModel model = fit_iforest(train, params);
    std::size_t limit = static_cast<std::size_t>(std::ceil(std::log2(64.0)));
    for (const auto& tree : model.trees) {
        // walk every root-to-leaf path
        struct Item { std::int32_t node; std::size_t depth; };
        std::vector<Item> stack{{0, 0}};
        while (!stack.empty()) {
            auto [idx, depth] = stack.back();
            stack.pop_back();
            const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
            if (node.feature < 0) {
                CHECK(depth <= limit);
            } else {
                stack.push_back({node.left, depth + 1});
                stack.push_back({node.right, depth + 1});
            }
        }
    }
}

TEST_CASE("isolation forest clamps oversized max_samples with a flag") {
    FeatureMatrix train = gaussian_cloud(40, 2, 71);
    IforestParams params;
    params.max_samples = 256;
    params.rng_seed = 71;
    IforestModel model = fit_iforest(train, params);
    CHECK(model.clamped_max_samples);
    CHECK(model.effective_max_samples == 40);
}

TEST_CASE("trained detectors share one scoring interface") {
    FeatureMatrix train = gaussian_cloud(100, 2, 81);
    OcnnParams ocnn;
    ocnn.epochs = 30;
    IforestParams iforest;
    iforest.n_estimators = 20;
    std::vector<TrainedDetector> detectors;
    detectors.emplace_back(fit_ocsvm(train));
    detectors.emplace_back(fit_ocnn(train, ocnn));
    detectors.emplace_back(fit_iforest(train, iforest));
    CHECK(detectors[0].kind() == DetectorKind::OCSVM);
    CHECK(detectors[1].kind() == DetectorKind::OCNN);
    CHECK(detectors[2].kind() == DetectorKind::IFOREST);
    for (const auto& d : detectors) {
        CHECK(d.feature_count() == 2);
        auto scores = d.score(train);
        CHECK(scores.size() == train.n_samples);
        // scoring the training set twice returns the identical vector
        CHECK(d.score(train) == scores);
    }

    FeatureMatrix empty;
    empty.n_features = 2;
    for (const auto& d : detectors) CHECK(d.score(empty).empty());
}
