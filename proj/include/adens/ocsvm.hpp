#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "adens/core.hpp"

namespace adens {

struct OcsvmParams {
    double nu = 0.05;
    double rbf_gamma = 0.0;  // 0 means 1/n_features, resolved at fit time
    double tolerance = 1e-4;
    std::size_t max_passes = 200;

    void validate() const {
        if (!(nu > 0.0 && nu <= 1.0)) throw InvalidParams("ocsvm: nu must be in (0,1]");
        if (rbf_gamma < 0.0) throw InvalidParams("ocsvm: gamma must be positive");
        if (tolerance <= 0.0) throw InvalidParams("ocsvm: tolerance must be positive");
        if (max_passes < 1) throw InvalidParams("ocsvm: max_passes must be >= 1");
    }
};

/// One-class SVM with RBF kernel, fitted by pairwise coordinate (SMO-style)
/// updates on the dual with first-order violation selection. Decision score
/// sum_j alpha_j K(x_j, x) - rho; >= 0 means normal.
class OcsvmModel {
public:
    OcsvmParams params;
    double gamma = 0.0;           // resolved kernel width
    double rho = 0.0;
    std::size_t feature_count = 0;
    std::vector<double> support_vectors;  // row-major, n_support x feature_count
    std::vector<double> duals;            // alpha for each support vector
    bool non_convergence = false;

    double score_row(const double* x, std::size_t n_features) const {
        if (n_features != feature_count)
            throw DimensionMismatch("ocsvm: expected " + std::to_string(feature_count) +
                                    " features, got " + std::to_string(n_features));
        double sum = 0.0;
        std::size_t n_sv = duals.size();
        for (std::size_t j = 0; j < n_sv; ++j) {
            const double* sv = support_vectors.data() + j * feature_count;
            double d2 = 0.0;
            for (std::size_t f = 0; f < feature_count; ++f) {
                double d = x[f] - sv[f];
                d2 += d * d;
            }
            sum += duals[j] * std::exp(-gamma * d2);
        }
        return sum - rho;
    }

    std::vector<double> score(const FeatureMatrix& data) const {
        std::vector<double> out;
        out.reserve(data.n_samples);
        for (std::size_t i = 0; i < data.n_samples; ++i)
            out.push_back(score_row(data.row(i), data.n_features));
        return out;
    }
};

namespace ocsvm_detail {

// Lazy column cache for the training kernel matrix.
class KernelCache {
public:
    KernelCache(const FeatureMatrix& data, double gamma) : data_(data), gamma_(gamma) {
        columns_.resize(data.n_samples);
    }

    const std::vector<double>& column(std::size_t i) {
        auto& col = columns_[i];
        if (col.empty()) {
            std::size_t n = data_.n_samples;
            col.resize(n);
            const double* xi = data_.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                const double* xj = data_.row(j);
                double d2 = 0.0;
                for (std::size_t f = 0; f < data_.n_features; ++f) {
                    double d = xi[f] - xj[f];
                    d2 += d * d;
                }
                col[j] = std::exp(-gamma_ * d2);
            }
        }
        return col;
    }

private:
    const FeatureMatrix& data_;
    double gamma_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace ocsvm_detail

inline OcsvmModel fit_ocsvm(const FeatureMatrix& train, const OcsvmParams& params = {}) {
    params.validate();
    train.validate();
    std::size_t n = train.n_samples;
    if (n < 2) throw InvalidParams("ocsvm: need at least 2 training samples");

    double gamma = params.rbf_gamma > 0.0 ? params.rbf_gamma
                                          : 1.0 / static_cast<double>(train.n_features);
    double cap = 1.0 / (params.nu * static_cast<double>(n));

    // standard one-class initialization: the first floor(nu*n) duals at the cap
    std::vector<double> alpha(n, 0.0);
    std::size_t n_cap = static_cast<std::size_t>(params.nu * static_cast<double>(n));
    for (std::size_t i = 0; i < n_cap; ++i) alpha[i] = cap;
    if (n_cap < n) alpha[n_cap] = 1.0 - cap * static_cast<double>(n_cap);

    ocsvm_detail::KernelCache cache(train, gamma);
    std::vector<double> grad(n, 0.0);  // (Q alpha)_i
    for (std::size_t j = 0; j < n; ++j) {
        if (alpha[j] == 0.0) continue;
        const auto& col = cache.column(j);
        for (std::size_t i = 0; i < n; ++i) grad[i] += alpha[j] * col[i];
    }

    const double eps_bound = 1e-12;
    std::size_t max_iter = params.max_passes * n;
    double violation = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // i: smallest gradient among duals below the cap; j: largest among
        // positive duals. Lowest index wins ties.
        std::size_t best_i = n, best_j = n;
        double min_up = std::numeric_limits<double>::infinity();
        double max_low = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (alpha[k] < cap - eps_bound && grad[k] < min_up) {
                min_up = grad[k];
                best_i = k;
            }
            if (alpha[k] > eps_bound && grad[k] > max_low) {
                max_low = grad[k];
                best_j = k;
            }
        }
        violation = max_low - min_up;
        if (best_i == n || best_j == n || violation < params.tolerance) break;

        const auto& col_i = cache.column(best_i);
        const auto& col_j = cache.column(best_j);
        double eta = col_i[best_i] + col_j[best_j] - 2.0 * col_i[best_j];
        if (eta < 1e-12) eta = 1e-12;
        double delta = (grad[best_j] - grad[best_i]) / eta;
        delta = std::min(delta, cap - alpha[best_i]);
        delta = std::min(delta, alpha[best_j]);
        alpha[best_i] += delta;
        alpha[best_j] -= delta;
        for (std::size_t k = 0; k < n; ++k) grad[k] += delta * (col_i[k] - col_j[k]);
    }

    // rho: any value in the KKT bracket is consistent at the stopping
    // tolerance; the smallest free-support-vector gradient keeps boundary
    // vectors on the normal side of the decision function
    double rho;
    double free_min = std::numeric_limits<double>::infinity();
    std::size_t free_cnt = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (alpha[k] > eps_bound && alpha[k] < cap - eps_bound) {
            free_min = std::min(free_min, grad[k]);
            ++free_cnt;
        }
    if (free_cnt > 0) {
        rho = free_min;
    } else {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (alpha[k] <= eps_bound) ub = std::min(ub, grad[k]);
            if (alpha[k] >= cap - eps_bound) lb = std::max(lb, grad[k]);
        }
        rho = (ub + lb) / 2.0;
    }

    OcsvmModel model;
    model.params = params;
    model.gamma = gamma;
    model.rho = rho;
    model.feature_count = train.n_features;
    model.non_convergence = violation > 10.0 * params.tolerance;
    for (std::size_t k = 0; k < n; ++k) {
        if (alpha[k] <= eps_bound) continue;
        model.duals.push_back(alpha[k]);
        const double* x = train.row(k);
        model.support_vectors.insert(model.support_vectors.end(), x, x + train.n_features);
    }
    return model;
}

}  // namespace adens
