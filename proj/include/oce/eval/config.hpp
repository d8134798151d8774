#pragma once

// Protocol configuration, presets and their JSON form. Reading a JSON
// object overlays its keys onto the current values; unknown keys are
// rejected.

#include <string>
#include <string_view>
#include <vector>

#include "oce/core/json_util.hpp"
#include "oce/eval/fold_plan.hpp"
#include "oce/eval/prepare.hpp"
#include "oce/nn/network.hpp"
#include "oce/nn/train.hpp"

namespace oce {

inline void to_json(nlohmann::json& j, const PipelineConfig& c)
{
    j = {{"frames_kept", c.frames_kept}, {"threshold_quantile", c.threshold_quantile}};
}

inline void from_json(const nlohmann::json& j, PipelineConfig& c)
{
    json_util::reject_unknown(j, {"frames_kept", "threshold_quantile"}, "pipeline");
    json_util::read_opt(j, "frames_kept", c.frames_kept);
    json_util::read_opt(j, "threshold_quantile", c.threshold_quantile);
}

inline void to_json(nlohmann::json& j, const DetectorConfig& c)
{
    j = {{"threshold_k", c.threshold_k},
         {"noise_floor_rad", c.noise_floor_rad},
         {"noise_window", c.noise_window},
         {"peak_halfwidth", c.peak_halfwidth},
         {"relative_threshold", c.relative_threshold}};
}

inline void from_json(const nlohmann::json& j, DetectorConfig& c)
{
    json_util::reject_unknown(
        j, {"threshold_k", "noise_floor_rad", "noise_window", "peak_halfwidth", "relative_threshold"}, "detector");
    json_util::read_opt(j, "threshold_k", c.threshold_k);
    json_util::read_opt(j, "noise_floor_rad", c.noise_floor_rad);
    json_util::read_opt(j, "noise_window", c.noise_window);
    json_util::read_opt(j, "peak_halfwidth", c.peak_halfwidth);
    json_util::read_opt(j, "relative_threshold", c.relative_threshold);
}

inline void to_json(nlohmann::json& j, const VelocityConfig& c)
{
    j = {{"detector", c.detector}, {"min_r_squared", c.min_r_squared}, {"min_points", c.min_points}};
}

inline void from_json(const nlohmann::json& j, VelocityConfig& c)
{
    json_util::reject_unknown(j, {"detector", "min_r_squared", "min_points"}, "velocity");
    if (j.contains("detector"))
        from_json(j.at("detector"), c.detector);
    json_util::read_opt(j, "min_r_squared", c.min_r_squared);
    json_util::read_opt(j, "min_points", c.min_points);
}

} // namespace oce

namespace oce::nn {

inline void to_json(nlohmann::json& j, const TrainConfig& c)
{
    j = {{"lr", c.adam.lr},
         {"beta1", c.adam.beta1},
         {"beta2", c.adam.beta2},
         {"epsilon", c.adam.epsilon},
         {"batch_size", c.batch_size},
         {"max_epochs", c.max_epochs},
         {"patience", c.patience}};
}

/// The seed is derived per fold and model, so it is not a config key.
inline void from_json(const nlohmann::json& j, TrainConfig& c)
{
    json_util::reject_unknown(j, {"lr", "beta1", "beta2", "epsilon", "batch_size", "max_epochs", "patience"},
                              "train");
    json_util::read_opt(j, "lr", c.adam.lr);
    json_util::read_opt(j, "beta1", c.adam.beta1);
    json_util::read_opt(j, "beta2", c.adam.beta2);
    json_util::read_opt(j, "epsilon", c.adam.epsilon);
    json_util::read_opt(j, "batch_size", c.batch_size);
    json_util::read_opt(j, "max_epochs", c.max_epochs);
    json_util::read_opt(j, "patience", c.patience);
}

} // namespace oce::nn

namespace oce::eval {

enum class ModelKind { LR, SvrLinear, SvrRbf, Mlp50, Mlp100, Cnn1Dt, Cnn2Dt };

inline constexpr std::array<ModelKind, 7> kAllModels = {ModelKind::LR,     ModelKind::SvrLinear, ModelKind::SvrRbf,
                                                        ModelKind::Mlp50,  ModelKind::Mlp100,    ModelKind::Cnn1Dt,
                                                        ModelKind::Cnn2Dt};

inline std::string model_name(ModelKind m)
{
    switch (m) {
    case ModelKind::LR: return "LR";
    case ModelKind::SvrLinear: return "SVR-lin";
    case ModelKind::SvrRbf: return "SVR-RBF";
    case ModelKind::Mlp50: return "MLP50";
    case ModelKind::Mlp100: return "MLP100";
    case ModelKind::Cnn1Dt: return "CNN-1Dt";
    case ModelKind::Cnn2Dt: return "CNN-2Dt";
    }
    return "?";
}

inline ModelKind parse_model(std::string_view name)
{
    for (auto m : kAllModels)
        if (model_name(m) == name)
            return m;
    throw Error(Errc::ConfigError, "unknown model '" + std::string(name) + "'");
}

/// "all" or a comma-separated list of model names; result in canonical order.
inline std::vector<ModelKind> parse_model_list(std::string_view list)
{
    if (list == "all")
        return {kAllModels.begin(), kAllModels.end()};
    std::vector<bool> chosen(kAllModels.size(), false);
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto end = std::min(list.find(',', start), list.size());
        const auto m = parse_model(list.substr(start, end - start));
        chosen[static_cast<std::size_t>(m)] = true;
        start = end + 1;
    }
    std::vector<ModelKind> out;
    for (std::size_t i = 0; i < kAllModels.size(); ++i)
        if (chosen[i])
            out.push_back(kAllModels[i]);
    return out;
}

inline bool uses_velocity(ModelKind m) { return m != ModelKind::Cnn1Dt && m != ModelKind::Cnn2Dt; }

/// Member defaults are the desk preset, sized for a single CPU core.
struct ProtocolConfig {
    std::string preset = "desk";
    PrepareConfig prepare{};
    FoldPlanConfig folds{};
    std::vector<double> svr_C{1.0, 10.0, 100.0};
    std::vector<double> svr_epsilon{0.05, 0.1, 0.5};
    std::vector<double> svr_gamma{0.1, 1.0, 10.0};
    double svr_tol = 1e-3;
    std::size_t svr_max_iterations = 100000;
    nn::TrainConfig mlp_train{.max_epochs = 60, .patience = 30};
    nn::TrainConfig cnn_1d_train{.max_epochs = 30, .patience = 30};
    nn::TrainConfig cnn_2d_train{.max_epochs = 15, .patience = 30};
    nn::CnnArch cnn_1d{.spatial_dims = 1, .k0 = 8};
    nn::CnnArch cnn_2d{.spatial_dims = 2, .k0 = 8};
    std::vector<ModelKind> models{kAllModels.begin(), kAllModels.end()};

    ProtocolConfig()
    {
        prepare.input_1d = {0, 0, 0, 1.0 / 0.1};
        prepare.input_2d = {16, 8, 200, 1.0 / 0.1};
    }
};

inline ProtocolConfig desk_preset() { return ProtocolConfig{}; }

/// Full-scale settings: k0 = 16, full-resolution inputs, 300 epochs.
inline ProtocolConfig paper_preset()
{
    ProtocolConfig c;
    c.preset = "paper";
    c.cnn_1d.k0 = 16;
    c.cnn_2d.k0 = 16;
    c.prepare.input_2d = {0, 0, 0, 1.0 / 0.1};
    for (auto* t : {&c.mlp_train, &c.cnn_1d_train, &c.cnn_2d_train})
        t->max_epochs = 300;
    return c;
}

inline ProtocolConfig preset_config(std::string_view name)
{
    if (name == "paper")
        return paper_preset();
    if (name == "desk")
        return desk_preset();
    throw Error(Errc::ConfigError, "unknown preset '" + std::string(name) + "'");
}

inline void to_json(nlohmann::json& j, const ProtocolConfig& c)
{
    std::vector<std::string> models;
    for (auto m : c.models)
        models.push_back(model_name(m));
    j = {{"preset", c.preset},
         {"acquisition", c.prepare.acquisition},
         {"pipeline", c.prepare.pipeline},
         {"velocity", c.prepare.velocity},
         {"input_1d", c.prepare.input_1d},
         {"input_2d", c.prepare.input_2d},
         {"samples_per_concentration", c.folds.samples_per_concentration},
         {"svr_C", c.svr_C},
         {"svr_epsilon", c.svr_epsilon},
         {"svr_gamma", c.svr_gamma},
         {"svr_tol", c.svr_tol},
         {"svr_max_iterations", c.svr_max_iterations},
         {"mlp_train", c.mlp_train},
         {"cnn_1d_train", c.cnn_1d_train},
         {"cnn_2d_train", c.cnn_2d_train},
         {"cnn_1d", c.cnn_1d},
         {"cnn_2d", c.cnn_2d},
         {"models", models}};
}

/// Overlays `j` onto `c`. A "preset" key first resets `c` to that preset.
inline void from_json(const nlohmann::json& j, ProtocolConfig& c)
{
    json_util::reject_unknown(j,
                              {"preset", "acquisition", "pipeline", "velocity", "input_1d", "input_2d",
                               "samples_per_concentration", "svr_C", "svr_epsilon", "svr_gamma", "svr_tol",
                               "svr_max_iterations", "mlp_train", "cnn_1d_train", "cnn_2d_train", "cnn_1d", "cnn_2d",
                               "models"},
                              "protocol");
    if (j.contains("preset"))
        c = preset_config(j.at("preset").get<std::string>());
    auto overlay = [&](const char* key, auto& target) {
        if (j.contains(key))
            from_json(j.at(key), target);
    };
    overlay("acquisition", c.prepare.acquisition);
    overlay("pipeline", c.prepare.pipeline);
    overlay("velocity", c.prepare.velocity);
    overlay("input_1d", c.prepare.input_1d);
    overlay("input_2d", c.prepare.input_2d);
    overlay("mlp_train", c.mlp_train);
    overlay("cnn_1d_train", c.cnn_1d_train);
    overlay("cnn_2d_train", c.cnn_2d_train);
    overlay("cnn_1d", c.cnn_1d);
    overlay("cnn_2d", c.cnn_2d);
    json_util::read_opt(j, "samples_per_concentration", c.folds.samples_per_concentration);
    json_util::read_opt(j, "svr_C", c.svr_C);
    json_util::read_opt(j, "svr_epsilon", c.svr_epsilon);
    json_util::read_opt(j, "svr_gamma", c.svr_gamma);
    json_util::read_opt(j, "svr_tol", c.svr_tol);
    json_util::read_opt(j, "svr_max_iterations", c.svr_max_iterations);
    if (j.contains("models")) {
        c.models.clear();
        for (const auto& m : j.at("models"))
            c.models.push_back(parse_model(m.get<std::string>()));
    }
}

} // namespace oce::eval
