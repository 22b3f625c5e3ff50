#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "adens/core.hpp"
#include "adens/rng.hpp"

namespace adens {

struct IforestParams {
    std::size_t n_estimators = 100;
    std::size_t max_samples = 256;
    double contamination = 0.007;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (n_estimators < 1) throw InvalidParams("iforest: n_estimators must be >= 1");
        if (max_samples < 2) throw InvalidParams("iforest: max_samples must be >= 2");
        if (!(contamination > 0.0 && contamination < 0.5))
            throw InvalidParams("iforest: contamination must be in (0, 0.5)");
    }
};

namespace iforest_detail {

/// c(n): average unsuccessful-search path length of a binary search tree over n
/// points, 2H(n-1) - 2(n-1)/n with H the exact harmonic number.
inline double average_path_length(std::size_t n) {
    static std::vector<double> harmonic = {0.0};  // harmonic[m] = H(m)
    if (n <= 1) return 0.0;
    std::size_t need = n - 1;
    while (harmonic.size() <= need) {
        std::size_t m = harmonic.size();
        harmonic.push_back(harmonic[m - 1] + 1.0 / static_cast<double>(m));
    }
    return 2.0 * harmonic[need] -
           2.0 * static_cast<double>(n - 1) / static_cast<double>(n);
}

struct TreeNode {
    // internal: split on feature < threshold; external: feature = -1
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t size = 0;  // external node: subsample count reaching it
};

struct Tree {
    std::vector<TreeNode> nodes;

    double path_length(const double* x) const {
        std::int32_t idx = 0;
        double depth = 0.0;
        while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
            const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
            idx = x[node.feature] < node.threshold ? node.left : node.right;
            depth += 1.0;
        }
        return depth + average_path_length(nodes[static_cast<std::size_t>(idx)].size);
    }
};

struct TreeBuilder {
    const FeatureMatrix& data;
    std::vector<std::size_t>& indices;  // subsample row indices, partitioned in place
    std::size_t height_limit;
    Rng& rng;
    Tree tree;

    std::int32_t build(std::size_t begin, std::size_t end, std::size_t depth) {
        std::size_t count = end - begin;
        std::int32_t idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (count <= 1 || depth >= height_limit) {
            tree.nodes[static_cast<std::size_t>(idx)].size = static_cast<std::uint32_t>(count);
            return idx;
        }
        // attribute uniform at random; constant-valued nodes terminate
        std::size_t d = data.n_features;
        std::size_t first_try = rng.below(d);
        int feature = -1;
        double lo = 0.0, hi = 0.0;
        for (std::size_t attempt = 0; attempt < d; ++attempt) {
            std::size_t f = (first_try + attempt) % d;
            lo = hi = data.at(indices[begin], f);
            for (std::size_t i = begin + 1; i < end; ++i) {
                double v = data.at(indices[i], f);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi > lo) {
                feature = static_cast<int>(f);
                break;
            }
        }
        if (feature < 0) {
            tree.nodes[static_cast<std::size_t>(idx)].size = static_cast<std::uint32_t>(count);
            return idx;
        }
        double threshold = rng.uniform(lo, hi);
        if (threshold <= lo) threshold = std::nextafter(lo, hi);  // keep both sides nonempty

        auto mid_it = std::partition(
            indices.begin() + static_cast<std::ptrdiff_t>(begin),
            indices.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t row) { return data.at(row, static_cast<std::size_t>(feature)) < threshold; });
        std::size_t mid = static_cast<std::size_t>(mid_it - indices.begin());

        tree.nodes[static_cast<std::size_t>(idx)].feature = feature;
        tree.nodes[static_cast<std::size_t>(idx)].threshold = threshold;
        std::int32_t left = build(begin, mid, depth + 1);
        std::int32_t right = build(mid, end, depth + 1);
        tree.nodes[static_cast<std::size_t>(idx)].left = left;
        tree.nodes[static_cast<std::size_t>(idx)].right = right;
        return idx;
    }
};

}  // namespace iforest_detail

/// Isolation forest. Anomaly measure a(x) = 2^(-E[h(x)]/c(max_samples));
/// signed decision score = threshold - a(x), with the threshold set at the
/// (1 - contamination)-quantile of the training anomaly measures.
class IforestModel {
public:
    IforestParams params;
    std::size_t feature_count = 0;
    std::size_t effective_max_samples = 0;  // clamped to n_samples when larger
    double threshold = 0.0;
    std::vector<iforest_detail::Tree> trees;
    bool clamped_max_samples = false;

    /// Unsigned anomaly measure in (0, 1); higher is more anomalous.
    double anomaly_measure_row(const double* x, std::size_t n_features) const {
        if (n_features != feature_count)
            throw DimensionMismatch("iforest: expected " + std::to_string(feature_count) +
                                    " features, got " + std::to_string(n_features));
        double mean_path = 0.0;
        for (const auto& tree : trees) mean_path += tree.path_length(x);
        mean_path /= static_cast<double>(trees.size());
        return std::exp2(-mean_path / iforest_detail::average_path_length(effective_max_samples));
    }

    double score_row(const double* x, std::size_t n_features) const {
        return threshold - anomaly_measure_row(x, n_features);
    }

    std::vector<double> score(const FeatureMatrix& data) const {
        std::vector<double> out;
        out.reserve(data.n_samples);
        for (std::size_t i = 0; i < data.n_samples; ++i)
            out.push_back(score_row(data.row(i), data.n_features));
        return out;
    }
};

inline IforestModel fit_iforest(const FeatureMatrix& train, const IforestParams& params = {}) {
    params.validate();
    train.validate();
    std::size_t n = train.n_samples;
    if (n < 2) throw InvalidParams("iforest: need at least 2 training samples");

    IforestModel model;
    model.params = params;
    model.feature_count = train.n_features;
    model.effective_max_samples = std::min(params.max_samples, n);
    model.clamped_max_samples = params.max_samples > n;

    std::size_t psi = model.effective_max_samples;
    std::size_t height_limit =
        static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));

    Rng rng(derive_seed(params.rng_seed, "iforest"));
    std::vector<std::size_t> sample(psi);
    for (std::size_t t = 0; t < params.n_estimators; ++t) {
        // uniform subsample without replacement (partial Fisher-Yates)
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < psi; ++i) {
            std::size_t j = i + rng.below(n - i);
            std::swap(pool[i], pool[j]);
            sample[i] = pool[i];
        }
        iforest_detail::TreeBuilder builder{train, sample, height_limit, rng, {}};
        builder.build(0, psi, 0);
        model.trees.push_back(std::move(builder.tree));
    }

    // threshold at the (1 - contamination)-quantile of training measures
    std::vector<double> measures(n);
    for (std::size_t i = 0; i < n; ++i)
        measures[i] = model.anomaly_measure_row(train.row(i), train.n_features);
    std::size_t k = static_cast<std::size_t>((1.0 - params.contamination) * static_cast<double>(n));
    if (k >= n) k = n - 1;
    std::nth_element(measures.begin(), measures.begin() + static_cast<std::ptrdiff_t>(k),
                     measures.end());
    model.threshold = measures[k];
    return model;
}

}  // namespace adens
