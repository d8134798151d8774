#pragma once

// Runs every configured model through the leave-one-concentration-out
// folds and assembles the metrics report.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "oce/core/parallel.hpp"
#include "oce/core/seed.hpp"
#include "oce/eval/config.hpp"
#include "oce/eval/fold_plan.hpp"
#include "oce/eval/metrics.hpp"
#include "oce/eval/prepare.hpp"
#include "oce/nn/network.hpp"
#include "oce/nn/train.hpp"
#include "oce/shallow/linreg.hpp"
#include "oce/shallow/scaler.hpp"
#include "oce/shallow/svr.hpp"

namespace oce::eval {

struct Prediction {
    std::string sample_id;
    std::size_t fold = 0;
    double truth = 0.0;
    double pred = 0.0;
};

struct FoldSummary {
    double held_out_concentration = 0.0;
    nlohmann::json selection = nlohmann::json::object(); ///< chosen hyperparameters / epoch
    std::size_t imputed = 0;                              ///< test samples with imputed velocity
};

struct ModelResult {
    std::string name;
    bool ok = false;
    std::string error;
    double mae = 0.0, mae_std = 0.0;
    double rmae = 0.0, rmae_std = 0.0;
    std::optional<double> acc;
    std::size_t imputed = 0;
    std::vector<FoldSummary> folds;
    std::vector<Prediction> predictions;
};

struct VelocityRow {
    double concentration_pct = 0.0;
    double mean_mps = 0.0;
    double std_mps = 0.0;
    std::size_t n_valid = 0;
    std::size_t n_total = 0;
};

struct SampleRecord {
    std::string sample_id;
    double concentration_pct = 0.0;
    std::optional<double> v_mps;
    std::string failure;
};

struct MetricsReport {
    std::string preset;
    std::uint64_t seed = 0;
    double sigma = 0.0;
    std::vector<double> concentrations;
    std::vector<VelocityRow> velocity;
    std::vector<SampleRecord> samples;
    std::vector<ModelResult> models;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Test predictions of one (model, fold) plus the fitted model itself.
struct FoldOutcome {
    std::vector<Prediction> predictions;
    FoldSummary summary;
    nlohmann::json model = nlohmann::json::object(); ///< shallow models and scalers
    std::optional<nn::Network<float>> network;
    std::vector<nn::EpochRecord> history;
};

namespace detail {

struct FoldData {
    std::vector<std::size_t> opt, val, test; // indices into prepared samples
};



/// Velocity inputs of one fold; failures take the optimization-subset mean.
struct VelocitySplit {
    std::vector<double> opt_v, opt_c, val_v, val_c, test_v;
    std::size_t test_imputed = 0;
};

inline VelocitySplit velocity_split(const std::vector<PreparedSample>& data, const FoldData& f)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (auto i : f.opt)
        if (data[i].velocity.ok()) {
            sum += data[i].velocity.estimate->v_mps;
            ++n;
        }
    if (n == 0)
        throw Error(Errc::TooFewPoints, "no valid velocity in the optimization subset");
    const double fill = sum / static_cast<double>(n);
    auto v_of = [&](std::size_t i) { return data[i].velocity.ok() ? data[i].velocity.estimate->v_mps : fill; };

    VelocitySplit s;
    for (auto i : f.opt) {
        s.opt_v.push_back(v_of(i));
        s.opt_c.push_back(data[i].sample.concentration_pct);
    }
    for (auto i : f.val) {
        s.val_v.push_back(v_of(i));
        s.val_c.push_back(data[i].sample.concentration_pct);
    }
    for (auto i : f.test) {
        s.test_v.push_back(v_of(i));
        s.test_imputed += data[i].velocity.ok() ? 0 : 1;
    }
    return s;
}

inline double validation_mae(const std::function<double(double)>& predict, const std::vector<double>& v,
                             const std::vector<double>& c)
{
    std::vector<double> p;
    p.reserve(v.size());
    for (double x : v)
        p.push_back(predict(x));
    return mae(p, c);
}

inline nn::Dataset<float> scalar_dataset(const std::vector<double>& v, const std::vector<double>& c,
                                         const shallow::FeatureScaler& scaler)
{
    nn::Dataset<float> d;
    for (std::size_t i = 0; i < v.size(); ++i) {
        d.inputs.emplace_back(nn::Shape{}, std::vector<float>{static_cast<float>(scaler.transform(v[i]))});
        d.targets.push_back(static_cast<float>(c[i]));
    }
    return d;
}

inline nn::Dataset<float> feature_dataset(const std::vector<PreparedSample>& data, const std::vector<std::size_t>& idx,
                                          bool volume)
{
    nn::Dataset<float> d;
    for (auto i : idx) {
        d.inputs.push_back(volume ? data[i].volume_input : data[i].map_input);
        d.targets.push_back(static_cast<float>(data[i].sample.concentration_pct));
    }
    return d;
}

inline nlohmann::json train_summary(const nn::TrainResult& r)
{
    return {{"best_epoch", r.best_epoch},
            {"epochs_run", r.history.size()},
            {"best_val_mae", r.best_val_mae},
            {"initial_train_mse", r.initial_train_mse},
            {"final_train_mse", r.history.empty() ? r.initial_train_mse : r.history.back().train_mse}};
}

} // namespace detail

/// Fits one model on a fold's optimization subset (validation subset for
/// model selection) and predicts its test subset. Seeds depend on the
/// model and the held-out concentration only.
inline FoldOutcome train_fold(ModelKind model, std::size_t fold_index, const Fold& fold, const detail::FoldData& f,
                              const std::vector<PreparedSample>& data, const ProtocolConfig& cfg, std::uint64_t seed)
{
    using namespace detail;
    FoldOutcome out;
    out.summary.held_out_concentration = fold.held_out_concentration;
    std::vector<double> preds;
    const std::string tag = model_name(model) + ":heldout" + std::to_string(fold.held_out_concentration);

    if (uses_velocity(model)) {
        const auto s = velocity_split(data, f);
        out.summary.imputed = s.test_imputed;
        const auto scaler = shallow::FeatureScaler::fit(s.opt_v);
        if (model == ModelKind::LR) {
            const auto lm = shallow::fit_linreg(s.opt_v, s.opt_c);
            out.summary.selection = {{"slope", lm.slope}, {"intercept", lm.intercept}};
            out.model = {{"regressor", lm}};
            for (double v : s.test_v)
                preds.push_back(lm.predict(v));
        } else if (model == ModelKind::SvrLinear || model == ModelKind::SvrRbf) {
            const auto xs = scaler.transform(s.opt_v);
            const std::vector<double> gammas =
                model == ModelKind::SvrRbf ? cfg.svr_gamma : std::vector<double>{1.0};
            std::optional<shallow::SvrModel> best;
            double best_mae = 0.0;
            std::size_t failed = 0;
            std::string last_error;
            for (double C : cfg.svr_C)
                for (double eps : cfg.svr_epsilon)
                    for (double gamma : gammas) {
                        shallow::SvrParams p;
                        p.kernel = model == ModelKind::SvrRbf ? shallow::Kernel::rbf(gamma) : shallow::Kernel::linear();
                        p.C = C;
                        p.epsilon = eps;
                        p.tol = cfg.svr_tol;
                        p.max_iterations = cfg.svr_max_iterations;
                        try {
                            auto m = shallow::fit_svr(xs, s.opt_c, p);
                            const double vm = validation_mae(
                                [&](double v) { return m.predict(scaler.transform(v)); }, s.val_v, s.val_c);
                            if (!best || vm < best_mae) {
                                best = std::move(m);
                                best_mae = vm;
                            }
                        } catch (const Error& e) {
                            if (e.code() != Errc::NoConvergence)
                                throw;
                            ++failed;
                            last_error = e.what();
                        }
                    }
            if (!best)
                throw Error(Errc::NoConvergence, "every SVR grid point failed: " + last_error);
            out.summary.selection = {{"C", best->C},           {"epsilon", best->epsilon},
                                     {"val_mae", best_mae},    {"grid_failures", failed},
                                     {"support", best->coef.size()}};
            if (model == ModelKind::SvrRbf)
                out.summary.selection["gamma"] = best->kernel.gamma;
            out.model = {{"regressor", *best}, {"scaler", scaler}};
            for (double v : s.test_v)
                preds.push_back(best->predict(scaler.transform(v)));
        } else {
            const std::vector<std::size_t> hidden =
                model == ModelKind::Mlp50 ? std::vector<std::size_t>{50, 50} : std::vector<std::size_t>{100, 100};
            auto net = nn::build_mlp<float>(hidden, derive_sample_seed(seed, "init:" + tag));
            auto train_cfg = cfg.mlp_train;
            train_cfg.seed = derive_sample_seed(seed, "shuffle:" + tag);
            train_cfg.record_initial_mse = true;
            const auto r = nn::train_model(net, scalar_dataset(s.opt_v, s.opt_c, scaler),
                                           scalar_dataset(s.val_v, s.val_c, scaler), train_cfg);
            out.summary.selection = train_summary(r);
            out.model = {{"scaler", scaler}};
            out.history = r.history;
            for (double v : s.test_v)
                preds.push_back(static_cast<double>(
                    net.forward(nn::Feature<float>(nn::Shape{}, {static_cast<float>(scaler.transform(v))}))));
            out.network = std::move(net);
        }
    } else {
        const bool volume = model == ModelKind::Cnn2Dt;
        auto net = nn::build_cnn<float>(volume ? cfg.cnn_2d : cfg.cnn_1d, derive_sample_seed(seed, "init:" + tag));
        auto train_cfg = volume ? cfg.cnn_2d_train : cfg.cnn_1d_train;
        train_cfg.seed = derive_sample_seed(seed, "shuffle:" + tag);
        train_cfg.record_initial_mse = true;
        const auto r = nn::train_model(net, feature_dataset(data, f.opt, volume), feature_dataset(data, f.val, volume),
                                       train_cfg);
        out.summary.selection = train_summary(r);
        out.history = r.history;
        for (auto i : f.test)
            preds.push_back(static_cast<double>(net.forward(volume ? data[i].volume_input : data[i].map_input)));
        out.network = std::move(net);
    }

    for (std::size_t k = 0; k < f.test.size(); ++k) {
        const auto& s = data[f.test[k]].sample;
        if (!std::isfinite(preds[k]))
            throw Error(Errc::NonFiniteLoss, "non-finite prediction for " + s.id);
        out.predictions.push_back({s.id, fold_index, s.concentration_pct, preds[k]});
    }
    return out;
}

namespace detail {

inline void finalize_metrics(ModelResult& r, double sigma)
{
    std::vector<double> pred, truth;
    for (const auto& p : r.predictions) {
        pred.push_back(p.pred);
        truth.push_back(p.truth);
    }
    const auto errs = absolute_errors(pred, truth);
    r.mae = mean(errs);
    r.mae_std = population_std(errs);
    r.rmae = rmae(r.mae, sigma);
    r.rmae_std = r.mae_std / sigma;
    try {
        r.acc = acc(pred, truth);
    } catch (const Error&) {
        r.acc.reset();
    }
}

} // namespace detail

/// Population std of the distinct concentrations present in `samples`.
inline double concentration_sigma(const std::vector<double>& concentrations)
{
    return population_std(concentrations);
}

inline std::vector<VelocityRow> velocity_summary(const std::vector<PreparedSample>& data)
{
    std::map<double, std::vector<double>, std::greater<>> valid;
    std::map<double, std::size_t, std::greater<>> total;
    for (const auto& d : data) {
        ++total[d.sample.concentration_pct];
        if (d.velocity.ok())
            valid[d.sample.concentration_pct].push_back(d.velocity.estimate->v_mps);
    }
    std::vector<VelocityRow> rows;
    for (const auto& [c, n] : total) {
        VelocityRow row;
        row.concentration_pct = c;
        row.n_total = n;
        const auto it = valid.find(c);
        if (it != valid.end()) {
            row.n_valid = it->second.size();
            row.mean_mps = mean(it->second);
            row.std_mps = population_std(it->second);
        }
        rows.push_back(row);
    }
    return rows;
}

/// Resolves a fold's sample ids to indices into `data`.
inline std::vector<detail::FoldData> resolve_folds(const std::vector<PreparedSample>& data,
                                                   const std::vector<Fold>& folds)
{
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < data.size(); ++i)
        index.emplace(data[i].sample.id, i);
    auto lookup = [&](const std::vector<std::string>& ids) {
        std::vector<std::size_t> out;
        for (const auto& id : ids) {
            const auto it = index.find(id);
            if (it == index.end())
                throw Error(Errc::BadCounts, "fold references unknown sample " + id);
            out.push_back(it->second);
        }
        return out;
    };
    std::vector<detail::FoldData> fold_data;
    for (const auto& f : folds)
        fold_data.push_back({lookup(f.optimization_ids), lookup(f.validation_ids), lookup(f.test_ids)});
    return fold_data;
}

inline MetricsReport run_protocol(const std::vector<PreparedSample>& data, const std::vector<Fold>& folds,
                                  const ProtocolConfig& cfg, std::uint64_t seed, const ProgressFn& progress = {})
{
    const auto fold_data = resolve_folds(data, folds);

    MetricsReport report;
    report.preset = cfg.preset;
    report.seed = seed;
    for (const auto& f : folds)
        report.concentrations.push_back(f.held_out_concentration);
    report.sigma = concentration_sigma(report.concentrations);
    report.velocity = velocity_summary(data);
    for (const auto& d : data)
        report.samples.push_back({d.sample.id, d.sample.concentration_pct,
                                  d.velocity.ok() ? std::optional<double>(d.velocity.estimate->v_mps) : std::nullopt,
                                  d.velocity.failure});

    const std::size_t n_models = cfg.models.size();
    const std::size_t n_folds = folds.size();
    std::vector<std::optional<FoldOutcome>> outcomes(n_models * n_folds);
    std::vector<std::string> errors(n_models * n_folds);
    parallel_for(outcomes.size(), [&](std::size_t task) {
        const std::size_t m = task / n_folds, k = task % n_folds;
        const auto name = model_name(cfg.models[m]);
        try {
            auto o = train_fold(cfg.models[m], k, folds[k], fold_data[k], data, cfg, seed);
            o.network.reset(); // only predictions are kept
            outcomes[task] = std::move(o);
            if (progress)
                progress(name + " fold " + std::to_string(k + 1) + "/" + std::to_string(n_folds) + " done");
        } catch (const std::exception& e) {
            errors[task] = e.what();
            if (progress)
                progress(name + " fold " + std::to_string(k + 1) + " failed: " + e.what());
        }
    });

    for (std::size_t m = 0; m < n_models; ++m) {
        ModelResult r;
        r.name = model_name(cfg.models[m]);
        r.ok = true;
        for (std::size_t k = 0; k < n_folds; ++k) {
            const auto& o = outcomes[m * n_folds + k];
            if (!o) {
                r.ok = false;
                r.error = "fold " + std::to_string(k) + ": " + errors[m * n_folds + k];
                break;
            }
            r.folds.push_back(o->summary);
            r.imputed += o->summary.imputed;
            r.predictions.insert(r.predictions.end(), o->predictions.begin(), o->predictions.end());
        }
        if (r.ok) {
            detail::finalize_metrics(r, report.sigma);
        } else {
            r.folds.clear();
            r.predictions.clear();
            r.imputed = 0;
        }
        report.models.push_back(std::move(r));
    }
    return report;
}

} // namespace oce::eval
