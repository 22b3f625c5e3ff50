#pragma once

#include <string>
#include <variant>

#include "adens/core.hpp"
#include "adens/iforest.hpp"
#include "adens/ocnn.hpp"
#include "adens/ocsvm.hpp"

namespace adens {

enum class DetectorKind { OCSVM, OCNN, IFOREST };

inline std::string to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::OCSVM: return "ocsvm";
        case DetectorKind::OCNN: return "ocnn";
        case DetectorKind::IFOREST: return "iforest";
    }
    return "?";
}

/// Fitted base detector behind one scoring interface: score >= 0 means normal,
/// score < 0 means anomaly.
class TrainedDetector {
public:
    TrainedDetector() = default;
    TrainedDetector(OcsvmModel m) : model_(std::move(m)) {}
    TrainedDetector(OcnnModel m) : model_(std::move(m)) {}
    TrainedDetector(IforestModel m) : model_(std::move(m)) {}

    DetectorKind kind() const {
        return static_cast<DetectorKind>(model_.index());
    }

    std::size_t feature_count() const {
        return std::visit([](const auto& m) { return m.feature_count; }, model_);
    }

    bool non_convergence() const {
        if (const auto* m = std::get_if<OcsvmModel>(&model_)) return m->non_convergence;
        if (const auto* m = std::get_if<OcnnModel>(&model_)) return m->non_convergence;
        return false;
    }

    double score_row(const double* x, std::size_t n_features) const {
        return std::visit([&](const auto& m) { return m.score_row(x, n_features); }, model_);
    }

    std::vector<double> score(const FeatureMatrix& data) const {
        return std::visit([&](const auto& m) { return m.score(data); }, model_);
    }

    template <class T>
    const T& as() const {
        return std::get<T>(model_);
    }

private:
    std::variant<OcsvmModel, OcnnModel, IforestModel> model_;
};

}  // namespace adens
