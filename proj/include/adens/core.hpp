#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adens {

// Error hierarchy used across the library. Exit-code mapping lives in the CLI.
struct MalformedCsv : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateGroups : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Label : int { normal = 0, anomaly = 1 };

/// Row-major table of real-valued samples. The universal input.
struct FeatureMatrix {
    std::size_t n_samples = 0;
    std::size_t n_features = 0;
    std::vector<double> values;  // n_samples * n_features, row-major
    std::vector<std::string> feature_names;

    double at(std::size_t row, std::size_t col) const {
        return values[row * n_features + col];
    }
    double& at(std::size_t row, std::size_t col) {
        return values[row * n_features + col];
    }
    const double* row(std::size_t i) const { return values.data() + i * n_features; }

    void validate() const {
        if (n_features < 1 || n_samples < 1)
            throw InvalidParams("FeatureMatrix: need at least one sample and one feature");
        if (values.size() != n_samples * n_features)
            throw DimensionMismatch("FeatureMatrix: values size does not match shape");
        for (double v : values)
            if (!std::isfinite(v))
                throw InvalidParams("FeatureMatrix: non-finite value");
    }
};

/// FeatureMatrix plus per-sample labels and optional anomaly-scenario tags (1-7).
struct LabeledSet {
    FeatureMatrix features;
    std::vector<Label> labels;
    std::vector<std::optional<int>> scenario_tags;

    std::size_t size() const { return features.n_samples; }

    void validate() const {
        features.validate();
        if (labels.size() != features.n_samples)
            throw LengthMismatch("LabeledSet: labels length != n_samples");
        if (!scenario_tags.empty()) {
            if (scenario_tags.size() != features.n_samples)
                throw LengthMismatch("LabeledSet: scenario_tags length != n_samples");
            for (std::size_t i = 0; i < scenario_tags.size(); ++i)
                if (scenario_tags[i].has_value() && labels[i] != Label::anomaly)
                    throw InvalidParams("LabeledSet: scenario tag on a normal sample");
        }
    }

    std::size_t count_anomalies() const {
        std::size_t n = 0;
        for (Label l : labels)
            if (l == Label::anomaly) ++n;
        return n;
    }
};

}  // namespace adens
