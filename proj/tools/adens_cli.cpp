// Command-line front door: simulate synthetic process data, train an ensemble,
// predict, evaluate, and run the model-comparison study.
//
// Exit codes: 0 ok, 2 usage/invalid configuration, 3 I/O failure,
// 4 data mismatch.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adens/adens.hpp"

namespace {

using namespace adens;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitMismatch = 4;

struct TrainOptions {
    std::string data_path;
    std::string out_path = "model.json";
    std::string strategy = "stacking";
    std::string learner = "ols";
    double ridge_lambda = 1.0;
    std::size_t knn_k = 5;
    double ocsvm_nu = 0.05;
    double ocsvm_gamma = 0.0;
    double ocsvm_tolerance = 1e-4;
    std::size_t ocsvm_max_passes = 200;
    std::size_t ocnn_hidden = 32;
    double ocnn_nu = 0.05;
    double ocnn_lr = 1e-3;
    std::size_t ocnn_epochs = 200;
    std::size_t if_estimators = 100;
    std::size_t if_max_samples = 256;
    double if_contamination = 0.007;
    std::uint64_t seed = 0;
};

VotingStrategy make_strategy(const TrainOptions& opt, std::uint64_t seed) {
    VotingStrategy s;
    if (opt.strategy == "majority") s.kind = StrategyKind::MAJORITY;
    else if (opt.strategy == "max") s.kind = StrategyKind::MAXSCORE;
    else if (opt.strategy == "soft") s.kind = StrategyKind::SOFT;
    else if (opt.strategy == "weighted") s.kind = StrategyKind::WEIGHTED;
    else if (opt.strategy == "stacking") s.kind = StrategyKind::STACKING;
    else throw InvalidConfig("unknown strategy '" + opt.strategy + "'");
    if (s.kind == StrategyKind::WEIGHTED) {
        if (opt.learner == "rmse") s.weight_learner = WeightLearner::RMSE;
        else if (opt.learner == "ols") s.weight_learner = WeightLearner::OLS;
        else if (opt.learner == "ridge") s.weight_learner = WeightLearner::RIDGE;
        else if (opt.learner == "knn") s.weight_learner = WeightLearner::KNN;
        else throw InvalidConfig("unknown learner '" + opt.learner + "'");
        s.ridge_lambda = opt.ridge_lambda;
        s.knn_k = opt.knn_k;
    }
    if (s.kind == StrategyKind::STACKING) {
        // the --if-* flags tune the base detector; the meta-detector keeps its
        // published defaults
        s.meta_params.rng_seed = derive_seed(seed, "meta-iforest");
    }
    return s;
}

DetectorParams make_detector_params(const TrainOptions& opt) {
    DetectorParams p;
    p.ocsvm.nu = opt.ocsvm_nu;
    p.ocsvm.rbf_gamma = opt.ocsvm_gamma;
    p.ocsvm.tolerance = opt.ocsvm_tolerance;
    p.ocsvm.max_passes = opt.ocsvm_max_passes;
    p.ocnn.hidden_units = opt.ocnn_hidden;
    p.ocnn.nu = opt.ocnn_nu;
    p.ocnn.learning_rate = opt.ocnn_lr;
    p.ocnn.epochs = opt.ocnn_epochs;
    p.ocnn.rng_seed = derive_seed(opt.seed, "ocnn");
    p.iforest.n_estimators = opt.if_estimators;
    p.iforest.max_samples = opt.if_max_samples;
    p.iforest.contamination = opt.if_contamination;
    p.iforest.rng_seed = derive_seed(opt.seed, "iforest");
    return p;
}

int cmd_simulate(const std::string& out_dir, std::uint64_t seed) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    PaperSplits splits = make_paper_splits(seed);
    auto path = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    write_csv(splits.train, path("train.csv"), false);
    for (std::size_t t = 0; t < 5; ++t)
        write_csv(splits.tests[t], path("test" + std::to_string(t + 1) + ".csv"));
    std::cout << "wrote train.csv (" << splits.train.size() << " rows) and test1..5.csv to "
              << out_dir << "\n";
    return kExitOk;
}

int cmd_train(const TrainOptions& opt) {
    LabeledSet train = load_csv(opt.data_path);
    if (train.count_anomalies() > 0)
        std::cerr << "warning: training file contains anomaly labels; labels are ignored "
                     "(unsupervised fit)\n";
    VotingStrategy strategy = make_strategy(opt, opt.seed);
    EnsembleModel model = fit_ensemble(train.features, strategy, make_detector_params(opt));
    if (model.any_non_convergence())
        std::cerr << "warning: a base detector stopped before reaching its tolerance\n";
    save_ensemble(model, opt.out_path);

    std::cout << "strategy: " << to_string(strategy.kind) << "\n";
    if (strategy.kind == StrategyKind::WEIGHTED) {
        std::cout << "learner: " << to_string(strategy.weight_learner) << "\nweights:";
        for (double w : model.weights) std::cout << ' ' << w;
        std::cout << "\n";
    }
    for (std::size_t k = 0; k < kNumDetectors; ++k)
        std::cout << to_string(model.base.detectors[k].kind()) << " training-score range: ["
                  << model.base.ranges[k].min << ", " << model.base.ranges[k].max << "]\n";
    std::cout << "model written to " << opt.out_path << "\n";
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
    EnsembleModel model = load_ensemble(model_path);
    LabeledSet data = load_csv(data_path);
    EnsemblePrediction pred = predict_ensemble(model, data.features);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "label,score\n";
    for (std::size_t i = 0; i < pred.labels.size(); ++i)
        out << (pred.labels[i] == Label::anomaly ? 1 : 0) << ','
            << detail::format_double(pred.final_scores[i]) << '\n';
    std::cout << "wrote " << pred.labels.size() << " predictions to " << out_path << "\n";
    return kExitOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path,
                 const std::string& hist_path, std::size_t n_bins) {
    EnsembleModel model = load_ensemble(model_path);
    LabeledSet data = load_csv(data_path);
    EnsemblePrediction pred = predict_ensemble(model, data.features);
    ConfusionCounts counts = confusion(data.labels, pred.labels);
    MetricsReport report = metrics(counts);
    std::printf("tp=%zu tn=%zu fp=%zu fn=%zu\n", counts.tp, counts.tn, counts.fp, counts.fn);
    std::printf("accuracy=%.4f precision=%.4f recall=%.4f f1=%.4f\n", report.accuracy,
                report.precision, report.recall, report.f1);
    if (report.undefined_ratio)
        std::cout << "note: a zero-denominator ratio was reported as 0\n";
    if (!hist_path.empty()) {
        HistogramExport h = histogram_export(pred.final_scores, data.labels, pred.labels, n_bins);
        std::ofstream out(hist_path);
        if (!out) throw std::runtime_error("cannot write " + hist_path);
        out << "stream,bin_low,bin_high,percent\n";
        for (std::size_t s = 0; s < 4; ++s)
            for (std::size_t b = 0; b < h.n_bins; ++b)
                out << HistogramExport::stream_names[s] << ','
                    << detail::format_double(h.edges[b]) << ','
                    << detail::format_double(h.edges[b + 1]) << ','
                    << detail::format_double(h.frequency[s][b]) << '\n';
        std::cout << "histogram written to " << hist_path << "\n";
    }
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& model_paths, std::size_t resamples,
                std::uint64_t seed, const std::string& out_path) {
    if (model_paths.size() < 2) throw InvalidConfig("compare needs at least 2 model files");
    std::vector<EnsembleModel> models;
    std::vector<std::string> names;
    for (const auto& p : model_paths) {
        models.push_back(load_ensemble(p));
        std::string name = std::filesystem::path(p).stem().string();
        name += "(" + to_string(models.back().strategy.kind) + ")";
        names.push_back(name);
    }
    ComparisonResult result = compare_models(models, names, resamples, seed);

    std::printf("%-28s %9s %8s %9s %8s %9s %8s %9s %8s\n", "model", "acc", "acc_sd", "prec",
                "prec_sd", "rec", "rec_sd", "f1", "f1_sd");
    for (const auto& s : result.summaries)
        std::printf("%-28s %9.4f %8.4f %9.4f %8.4f %9.4f %8.4f %9.4f %8.4f\n", s.name.c_str(),
                    s.mean_accuracy, s.std_accuracy, s.mean_precision, s.std_precision,
                    s.mean_recall, s.std_recall, s.mean_f1, s.std_f1);
    std::printf("F=%.4f, p=%.6g (df_between=%zu, df_within=%zu)\n", result.anova.f_value,
                result.anova.p_value, result.anova.df_between, result.anova.df_within);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << "model,acc_mean,acc_std,prec_mean,prec_std,rec_mean,rec_std,f1_mean,f1_std\n";
        for (const auto& s : result.summaries)
            out << s.name << ',' << s.mean_accuracy << ',' << s.std_accuracy << ','
                << s.mean_precision << ',' << s.std_precision << ',' << s.mean_recall << ','
                << s.std_recall << ',' << s.mean_f1 << ',' << s.std_f1 << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised ensemble anomaly detection over PLC-style process logs"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "master RNG seed, fanned out per component")
        ->configurable(true);

    auto* sim = app.add_subcommand("simulate", "write train.csv and test1..5.csv");
    std::string sim_out = ".";
    sim->add_option("--out", sim_out, "output directory");

    auto* train = app.add_subcommand("train", "fit an ensemble on a training CSV");
    TrainOptions topt;
    train->add_option("--data", topt.data_path, "training CSV")->required();
    train->add_option("--out", topt.out_path, "model output path");
    train->add_option("--strategy", topt.strategy, "majority|max|soft|weighted|stacking");
    train->add_option("--learner", topt.learner, "weighted-voting learner: rmse|ols|ridge|knn");
    train->add_option("--ridge-lambda", topt.ridge_lambda, "ridge penalty");
    train->add_option("--knn-k", topt.knn_k, "knn neighbor count");
    train->add_option("--ocsvm-nu", topt.ocsvm_nu, "ocsvm nu");
    train->add_option("--ocsvm-gamma", topt.ocsvm_gamma, "ocsvm RBF gamma (0 = 1/n_features)");
    train->add_option("--ocsvm-tolerance", topt.ocsvm_tolerance, "ocsvm KKT tolerance");
    train->add_option("--ocsvm-max-passes", topt.ocsvm_max_passes, "ocsvm pass budget");
    train->add_option("--ocnn-hidden", topt.ocnn_hidden, "ocnn hidden units");
    train->add_option("--ocnn-nu", topt.ocnn_nu, "ocnn nu");
    train->add_option("--ocnn-lr", topt.ocnn_lr, "ocnn learning rate");
    train->add_option("--ocnn-epochs", topt.ocnn_epochs, "ocnn epochs");
    train->add_option("--if-estimators", topt.if_estimators, "isolation forest tree count");
    train->add_option("--if-max-samples", topt.if_max_samples, "isolation forest subsample size");
    train->add_option("--if-contamination", topt.if_contamination, "isolation forest contamination");

    auto* predict = app.add_subcommand("predict", "score a CSV with a trained model");
    std::string pred_model, pred_data, pred_out = "predictions.csv";
    predict->add_option("--model", pred_model, "model file")->required();
    predict->add_option("--data", pred_data, "input CSV")->required();
    predict->add_option("--out", pred_out, "predictions CSV");

    auto* evaluate = app.add_subcommand("evaluate", "metrics on a labeled CSV");
    std::string eval_model, eval_data, eval_hist;
    std::size_t eval_bins = 20;
    evaluate->add_option("--model", eval_model, "model file")->required();
    evaluate->add_option("--data", eval_data, "labeled CSV")->required();
    evaluate->add_option("--hist", eval_hist, "write per-outcome score histogram CSV");
    evaluate->add_option("--bins", eval_bins, "histogram bin count");

    auto* compare = app.add_subcommand("compare", "resampled comparison + one-way ANOVA");
    std::vector<std::string> cmp_models;
    std::size_t cmp_resamples = 20;
    std::string cmp_out;
    compare->add_option("--models", cmp_models, "two or more model files")->required();
    compare->add_option("--resamples", cmp_resamples, "replicates per test-set spec");
    compare->add_option("--out", cmp_out, "write the summary table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        topt.seed = seed;
        if (sim->parsed()) return cmd_simulate(sim_out, seed);
        if (train->parsed()) return cmd_train(topt);
        if (predict->parsed()) return cmd_predict(pred_model, pred_data, pred_out);
        if (evaluate->parsed()) return cmd_evaluate(eval_model, eval_data, eval_hist, eval_bins);
        if (compare->parsed()) return cmd_compare(cmp_models, cmp_resamples, seed, cmp_out);
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const LengthMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const MalformedCsv& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const EmptyFile& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
