#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "adens/core.hpp"
#include "adens/ensemble.hpp"

namespace adens {

// Versioned, self-describing JSON model documents. nlohmann emits the shortest
// decimal text that round-trips each double exactly, so deserialize -> predict
// is bit-identical to the in-memory model.
inline constexpr int kModelFormatVersion = 1;

namespace model_io_detail {

using nlohmann::json;

inline json to_json(const OcsvmParams& p) {
    return {{"nu", p.nu},
            {"rbf_gamma", p.rbf_gamma},
            {"tolerance", p.tolerance},
            {"max_passes", p.max_passes}};
}
inline void from_json(const json& j, OcsvmParams& p) {
    p.nu = j.at("nu");
    p.rbf_gamma = j.at("rbf_gamma");
    p.tolerance = j.at("tolerance");
    p.max_passes = j.at("max_passes");
}

inline json to_json(const OcnnParams& p) {
    return {{"hidden_units", p.hidden_units},
            {"nu", p.nu},
            {"learning_rate", p.learning_rate},
            {"epochs", p.epochs},
            {"quantile_update_every", p.quantile_update_every},
            {"rng_seed", p.rng_seed}};
}
inline void from_json(const json& j, OcnnParams& p) {
    p.hidden_units = j.at("hidden_units");
    p.nu = j.at("nu");
    p.learning_rate = j.at("learning_rate");
    p.epochs = j.at("epochs");
    p.quantile_update_every = j.at("quantile_update_every");
    p.rng_seed = j.at("rng_seed");
}

inline json to_json(const IforestParams& p) {
    return {{"n_estimators", p.n_estimators},
            {"max_samples", p.max_samples},
            {"contamination", p.contamination},
            {"rng_seed", p.rng_seed}};
}
inline void from_json(const json& j, IforestParams& p) {
    p.n_estimators = j.at("n_estimators");
    p.max_samples = j.at("max_samples");
    p.contamination = j.at("contamination");
    p.rng_seed = j.at("rng_seed");
}

inline json to_json(const IforestModel& m) {
    json trees = json::array();
    for (const auto& tree : m.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.size});
        trees.push_back(std::move(nodes));
    }
    return {{"kind", "iforest"},
            {"params", to_json(m.params)},
            {"feature_count", m.feature_count},
            {"effective_max_samples", m.effective_max_samples},
            {"threshold", m.threshold},
            {"clamped_max_samples", m.clamped_max_samples},
            {"trees", std::move(trees)}};
}
inline IforestModel iforest_from_json(const json& j) {
    IforestModel m;
    from_json(j.at("params"), m.params);
    m.feature_count = j.at("feature_count");
    m.effective_max_samples = j.at("effective_max_samples");
    m.threshold = j.at("threshold");
    m.clamped_max_samples = j.at("clamped_max_samples");
    for (const auto& tree_j : j.at("trees")) {
        iforest_detail::Tree tree;
        for (const auto& n : tree_j) {
            iforest_detail::TreeNode node;
            node.feature = n.at(0);
            node.threshold = n.at(1);
            node.left = n.at(2);
            node.right = n.at(3);
            node.size = n.at(4);
            tree.nodes.push_back(node);
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

inline json to_json(const TrainedDetector& d) {
    switch (d.kind()) {
        case DetectorKind::OCSVM: {
            const auto& m = d.as<OcsvmModel>();
            return {{"kind", "ocsvm"},
                    {"params", to_json(m.params)},
                    {"gamma", m.gamma},
                    {"rho", m.rho},
                    {"feature_count", m.feature_count},
                    {"support_vectors", m.support_vectors},
                    {"duals", m.duals},
                    {"non_convergence", m.non_convergence}};
        }
        case DetectorKind::OCNN: {
            const auto& m = d.as<OcnnModel>();
            return {{"kind", "ocnn"},
                    {"params", to_json(m.params)},
                    {"feature_count", m.feature_count},
                    {"hidden_weights", m.hidden_weights},
                    {"output_weights", m.output_weights},
                    {"r", m.r},
                    {"non_convergence", m.non_convergence}};
        }
        case DetectorKind::IFOREST:
            return to_json(d.as<IforestModel>());
    }
    throw InvalidParams("unknown detector kind");
}

inline TrainedDetector detector_from_json(const json& j) {
    std::string kind = j.at("kind");
    if (kind == "ocsvm") {
        OcsvmModel m;
        from_json(j.at("params"), m.params);
        m.gamma = j.at("gamma");
        m.rho = j.at("rho");
        m.feature_count = j.at("feature_count");
        m.support_vectors = j.at("support_vectors").get<std::vector<double>>();
        m.duals = j.at("duals").get<std::vector<double>>();
        m.non_convergence = j.at("non_convergence");
        return TrainedDetector(std::move(m));
    }
    if (kind == "ocnn") {
        OcnnModel m;
        from_json(j.at("params"), m.params);
        m.feature_count = j.at("feature_count");
        m.hidden_weights = j.at("hidden_weights").get<std::vector<double>>();
        m.output_weights = j.at("output_weights").get<std::vector<double>>();
        m.r = j.at("r");
        m.non_convergence = j.at("non_convergence");
        return TrainedDetector(std::move(m));
    }
    if (kind == "iforest") return TrainedDetector(iforest_from_json(j));
    throw InvalidParams("unknown detector kind '" + kind + "'");
}

inline json to_json(const VotingStrategy& s) {
    json j = {{"kind", to_string(s.kind)}};
    if (s.kind == StrategyKind::WEIGHTED) {
        j["weight_learner"] = to_string(s.weight_learner);
        j["ridge_lambda"] = s.ridge_lambda;
        j["knn_k"] = s.knn_k;
    }
    if (s.kind == StrategyKind::STACKING) j["meta_params"] = to_json(s.meta_params);
    return j;
}
inline VotingStrategy strategy_from_json(const json& j) {
    VotingStrategy s;
    std::string kind = j.at("kind");
    if (kind == "majority") s.kind = StrategyKind::MAJORITY;
    else if (kind == "max") s.kind = StrategyKind::MAXSCORE;
    else if (kind == "soft") s.kind = StrategyKind::SOFT;
    else if (kind == "weighted") s.kind = StrategyKind::WEIGHTED;
    else if (kind == "stacking") s.kind = StrategyKind::STACKING;
    else throw InvalidParams("unknown strategy '" + kind + "'");
    if (s.kind == StrategyKind::WEIGHTED) {
        std::string learner = j.at("weight_learner");
        if (learner == "rmse") s.weight_learner = WeightLearner::RMSE;
        else if (learner == "ols") s.weight_learner = WeightLearner::OLS;
        else if (learner == "ridge") s.weight_learner = WeightLearner::RIDGE;
        else if (learner == "knn") s.weight_learner = WeightLearner::KNN;
        else throw InvalidParams("unknown weight learner '" + learner + "'");
        s.ridge_lambda = j.at("ridge_lambda");
        s.knn_k = j.at("knn_k");
    }
    if (s.kind == StrategyKind::STACKING) from_json(j.at("meta_params"), s.meta_params);
    return s;
}

}  // namespace model_io_detail

inline std::string serialize_ensemble(const EnsembleModel& model) {
    using model_io_detail::to_json;
    nlohmann::json j;
    j["format"] = "adens-ensemble";
    j["version"] = kModelFormatVersion;
    nlohmann::json detectors = nlohmann::json::array();
    nlohmann::json ranges = nlohmann::json::array();
    for (std::size_t k = 0; k < kNumDetectors; ++k) {
        detectors.push_back(to_json(model.base.detectors[k]));
        ranges.push_back({{"min", model.base.ranges[k].min}, {"max", model.base.ranges[k].max}});
    }
    j["detectors"] = std::move(detectors);
    j["ranges"] = std::move(ranges);
    j["strategy"] = to_json(model.strategy);
    if (model.strategy.kind == StrategyKind::WEIGHTED) j["weights"] = model.weights;
    if (model.strategy.kind == StrategyKind::STACKING) j["meta"] = to_json(model.meta);
    return j.dump(2);
}

inline EnsembleModel deserialize_ensemble(const std::string& text) {
    using namespace model_io_detail;
    json j = json::parse(text);
    if (j.at("format") != "adens-ensemble")
        throw InvalidParams("not an ensemble model document");
    if (j.at("version").get<int>() > kModelFormatVersion)
        throw InvalidParams("model document from a newer format version");
    EnsembleModel model;
    const auto& detectors = j.at("detectors");
    const auto& ranges = j.at("ranges");
    if (detectors.size() != kNumDetectors || ranges.size() != kNumDetectors)
        throw InvalidParams("ensemble document must carry exactly 3 detectors");
    for (std::size_t k = 0; k < kNumDetectors; ++k) {
        model.base.detectors[k] = detector_from_json(detectors[k]);
        model.base.ranges[k].min = ranges[k].at("min");
        model.base.ranges[k].max = ranges[k].at("max");
    }
    model.strategy = strategy_from_json(j.at("strategy"));
    if (model.strategy.kind == StrategyKind::WEIGHTED)
        model.weights = j.at("weights").get<std::vector<double>>();
    if (model.strategy.kind == StrategyKind::STACKING) model.meta = iforest_from_json(j.at("meta"));
    return model;
}

inline void save_ensemble(const EnsembleModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << serialize_ensemble(model) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

inline EnsembleModel load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_ensemble(text);
}

}  // namespace adens
