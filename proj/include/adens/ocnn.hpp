#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "adens/core.hpp"
#include "adens/rng.hpp"

namespace adens {

struct OcnnParams {
    std::size_t hidden_units = 32;
    double nu = 0.05;
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    std::size_t quantile_update_every = 10;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (hidden_units < 1) throw InvalidParams("ocnn: hidden_units must be >= 1");
        if (!(nu > 0.0 && nu <= 1.0)) throw InvalidParams("ocnn: nu must be in (0,1]");
        if (learning_rate <= 0.0) throw InvalidParams("ocnn: learning_rate must be positive");
        if (epochs < 1) throw InvalidParams("ocnn: epochs must be >= 1");
        if (quantile_update_every < 1) throw InvalidParams("ocnn: quantile_update_every must be >= 1");
    }
};

/// One-class neural network: tanh hidden layer, linear output, trained by
/// full-batch gradient descent on the one-class hinge objective. The bias r is
/// re-estimated periodically as the nu-quantile of current outputs. Decision
/// score = w.g(Vx) - r.
class OcnnModel {
public:
    OcnnParams params;
    std::size_t feature_count = 0;
    std::vector<double> hidden_weights;  // hidden_units x (feature_count + 1), bias last
    std::vector<double> output_weights;  // hidden_units
    double r = 0.0;
    bool non_convergence = false;

    double raw_output(const double* x, std::size_t n_features) const {
        if (n_features != feature_count)
            throw DimensionMismatch("ocnn: expected " + std::to_string(feature_count) +
                                    " features, got " + std::to_string(n_features));
        double y = 0.0;
        std::size_t h = output_weights.size();
        for (std::size_t s = 0; s < h; ++s) {
            const double* v = hidden_weights.data() + s * (feature_count + 1);
            double pre = v[feature_count];
            for (std::size_t f = 0; f < feature_count; ++f) pre += v[f] * x[f];
            y += output_weights[s] * std::tanh(pre);
        }
        return y;
    }

    double score_row(const double* x, std::size_t n_features) const {
        return raw_output(x, n_features) - r;
    }

    std::vector<double> score(const FeatureMatrix& data) const {
        std::vector<double> out;
        out.reserve(data.n_samples);
        for (std::size_t i = 0; i < data.n_samples; ++i)
            out.push_back(score_row(data.row(i), data.n_features));
        return out;
    }
};

namespace ocnn_detail {

// nu-quantile with index floor(nu * n): at most nu*n outputs fall strictly below
inline double nu_quantile(std::vector<double> values, double nu) {
    std::size_t k = static_cast<std::size_t>(nu * static_cast<double>(values.size()));
    if (k >= values.size()) k = values.size() - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    return values[static_cast<std::ptrdiff_t>(k)];
}

}  // namespace ocnn_detail

inline OcnnModel fit_ocnn(const FeatureMatrix& train, const OcnnParams& params = {}) {
    params.validate();
    train.validate();
    std::size_t n = train.n_samples;
    if (n < 2) throw InvalidParams("ocnn: need at least 2 training samples");
    std::size_t d = train.n_features;
    std::size_t h = params.hidden_units;

    OcnnModel model;
    model.params = params;
    model.feature_count = d;
    model.hidden_weights.resize(h * (d + 1));
    model.output_weights.resize(h);

    // Hidden units start in antisymmetric pairs: shared direction, opposite
    // bias and output weight. Each pair is then a localized ridge bump
    // w*(tanh(v.x+b) - tanh(v.x-b)) that vanishes far from the data, so the
    // initial network already scores remote points below the in-cluster
    // quantile instead of leaving the saturation values to chance. Magnitudes
    // are uniform in +-1/sqrt(fan_in) from the seeded generator.
    Rng rng(derive_seed(params.rng_seed, "ocnn-init"));
    double bound_v = 1.0 / std::sqrt(static_cast<double>(d + 1));
    double bound_w = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t s = 0; s + 1 < h; s += 2) {
        double* v0 = model.hidden_weights.data() + s * (d + 1);
        double* v1 = v0 + (d + 1);
        for (std::size_t f = 0; f < d; ++f) v1[f] = v0[f] = rng.uniform(-bound_v, bound_v);
        double b = std::abs(rng.uniform(-bound_v, bound_v));
        v0[d] = b;
        v1[d] = -b;
        double w = std::abs(rng.uniform(-bound_w, bound_w));
        model.output_weights[s] = w;
        model.output_weights[s + 1] = -w;
    }
    if (h % 2 == 1) {
        double* v = model.hidden_weights.data() + (h - 1) * (d + 1);
        for (std::size_t f = 0; f <= d; ++f) v[f] = rng.uniform(-bound_v, bound_v);
        model.output_weights[h - 1] = rng.uniform(-bound_w, bound_w);
    }

    std::vector<double> activations(n * h);
    std::vector<double> outputs(n);
    auto forward = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = train.row(i);
            double y = 0.0;
            for (std::size_t s = 0; s < h; ++s) {
                const double* v = model.hidden_weights.data() + s * (d + 1);
                double pre = v[d];
                for (std::size_t f = 0; f < d; ++f) pre += v[f] * x[f];
                double a = std::tanh(pre);
                activations[i * h + s] = a;
                y += model.output_weights[s] * a;
            }
            outputs[i] = y;
        }
    };

    forward();
    model.r = ocnn_detail::nu_quantile(outputs, params.nu);

    double inv_nu_n = 1.0 / (params.nu * static_cast<double>(n));
    std::vector<double> grad_w(h), grad_v(h * (d + 1));
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        std::fill(grad_v.begin(), grad_v.end(), 0.0);
        for (std::size_t s = 0; s < h; ++s) grad_w[s] = model.output_weights[s];
        for (std::size_t k = 0; k < grad_v.size(); ++k) grad_v[k] = model.hidden_weights[k];

        for (std::size_t i = 0; i < n; ++i) {
            if (outputs[i] >= model.r) continue;  // hinge inactive
            const double* x = train.row(i);
            const double* a = activations.data() + i * h;
            for (std::size_t s = 0; s < h; ++s) {
                grad_w[s] -= inv_nu_n * a[s];
                double back = inv_nu_n * model.output_weights[s] * (1.0 - a[s] * a[s]);
                double* gv = grad_v.data() + s * (d + 1);
                for (std::size_t f = 0; f < d; ++f) gv[f] -= back * x[f];
                gv[d] -= back;
            }
        }
        for (std::size_t s = 0; s < h; ++s)
            model.output_weights[s] -= params.learning_rate * grad_w[s];
        for (std::size_t k = 0; k < grad_v.size(); ++k)
            model.hidden_weights[k] -= params.learning_rate * grad_v[k];

        forward();
        if ((epoch + 1) % params.quantile_update_every == 0)
            model.r = ocnn_detail::nu_quantile(outputs, params.nu);
    }
    // final quantile pin so the training negative fraction tracks nu
    model.r = ocnn_detail::nu_quantile(outputs, params.nu);

    // hinge loss left on the table after the final r update
    double hinge = 0.0;
    for (double y : outputs) hinge += std::max(0.0, model.r - y);
    hinge /= static_cast<double>(n);
    double spread = 0.0;
    for (double y : outputs) spread = std::max(spread, std::abs(y - model.r));
    model.non_convergence = spread > 0.0 && hinge > 0.5 * spread;
    return model;
}

}  // namespace adens
