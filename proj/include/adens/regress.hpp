#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "adens/core.hpp"

namespace adens {

/// In-sample fit quality of predicting `target` from `predictors` (row-major,
/// n x p). Used to derive voting weights.
struct FitQuality {
    double r2 = 0.0;    // unclamped coefficient of determination
    double rmse = 0.0;  // root-mean-squared error of the same fit
};

namespace regress_detail {

// Gaussian elimination with partial pivoting for the small normal-equation
// systems (p + 1 unknowns, p = 2 in the ensemble).
inline std::vector<double> solve(std::vector<double> a, std::vector<double> b) {
    std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300) return {};  // singular
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double factor = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i * n + i];
    return b;
}

inline FitQuality quality(const std::vector<double>& target,
                          const std::vector<double>& predicted) {
    std::size_t n = target.size();
    double mean = 0.0;
    for (double y : target) mean += y;
    mean /= static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = target[i] - predicted[i];
        ss_res += e * e;
        double d = target[i] - mean;
        ss_tot += d * d;
    }
    FitQuality q;
    q.rmse = std::sqrt(ss_res / static_cast<double>(n));
    q.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    return q;
}

}  // namespace regress_detail

/// Least squares with intercept; `ridge_lambda` > 0 penalizes the slope
/// coefficients (never the intercept).
inline FitQuality linear_fit_quality(const std::vector<double>& predictors,
                                     const std::vector<double>& target, std::size_t p,
                                     double ridge_lambda = 0.0) {
    std::size_t n = target.size();
    if (n < 2) throw DegenerateMatrix("linear fit: need at least 2 samples");

    // constant columns duplicate the intercept and exact copies of an earlier
    // column make the normal equations singular; neither adds information
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < p; ++c) {
        bool constant = true;
        for (std::size_t i = 1; i < n && constant; ++i)
            constant = predictors[i * p + c] == predictors[c];
        if (constant) continue;
        bool duplicate = false;
        for (std::size_t k : kept) {
            bool same = true;
            for (std::size_t i = 0; i < n && same; ++i)
                same = predictors[i * p + c] == predictors[i * p + k];
            if (same) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) kept.push_back(c);
    }

    std::size_t q = kept.size();
    std::size_t m = q + 1;  // slopes + intercept (last)
    std::vector<double> xtx(m * m, 0.0), xty(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = predictors.data() + i * p;
        for (std::size_t a = 0; a < m; ++a) {
            double xa = a < q ? x[kept[a]] : 1.0;
            xty[a] += xa * target[i];
            for (std::size_t b = 0; b < m; ++b) {
                double xb = b < q ? x[kept[b]] : 1.0;
                xtx[a * m + b] += xa * xb;
            }
        }
    }
    for (std::size_t a = 0; a < q; ++a) xtx[a * m + a] += ridge_lambda;
    std::vector<double> beta = regress_detail::solve(xtx, xty);
    std::vector<double> predicted(n);
    if (beta.empty()) {
        // singular design: fall back to the intercept-only predictor
        double mean = 0.0;
        for (double y : target) mean += y;
        mean /= static_cast<double>(n);
        std::fill(predicted.begin(), predicted.end(), mean);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = predictors.data() + i * p;
            double yhat = beta[q];
            for (std::size_t a = 0; a < q; ++a) yhat += beta[a] * x[kept[a]];
            predicted[i] = yhat;
        }
    }
    return regress_detail::quality(target, predicted);
}

/// k-nearest-neighbor regression, Euclidean distance, uniform averaging.
/// In-sample predictions include the query point itself among the neighbors.
inline FitQuality knn_fit_quality(const std::vector<double>& predictors,
                                  const std::vector<double>& target, std::size_t p,
                                  std::size_t k) {
    std::size_t n = target.size();
    if (n < 2) throw DegenerateMatrix("knn fit: need at least 2 samples");
    if (k < 1) throw InvalidParams("knn fit: k must be >= 1");
    k = std::min(k, n);
    std::vector<double> predicted(n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = predictors.data() + i * p;
        for (std::size_t j = 0; j < n; ++j) {
            const double* xj = predictors.data() + j * p;
            double d2 = 0.0;
            for (std::size_t f = 0; f < p; ++f) {
                double d = xi[f] - xj[f];
                d2 += d * d;
            }
            dist[j] = {d2, j};  // index breaks distance ties
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        double sum = 0.0;
        for (std::size_t m = 0; m < k; ++m) sum += target[dist[m].second];
        predicted[i] = sum / static_cast<double>(k);
    }
    return regress_detail::quality(target, predicted);
}

}  // namespace adens
