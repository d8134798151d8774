#pragma once

// Per-sample features shared by all models of a protocol run.

#include <vector>

#include "oce/core/manifest.hpp"
#include "oce/core/parallel.hpp"
#include "oce/nn/inputs.hpp"
#include "oce/phasepipe.hpp"
#include "oce/velocity.hpp"
#include "oce/wavesim.hpp"

namespace oce::eval {

struct PrepareConfig {
    AcquisitionConfig acquisition{};
    PipelineConfig pipeline{};
    VelocityConfig velocity{};
    nn::InputSpec input_1d{0, 0, 0};
    nn::InputSpec input_2d{};
    bool need_1d = true;
    bool need_2d = true;
};

struct PreparedSample {
    Sample sample;
    VelocityFeature velocity;
    nn::Feature<float> map_input;
    nn::Feature<float> volume_input;
};

inline PreparedSample prepare_sample(const Manifest& manifest, const Sample& s, const PrepareConfig& cfg)
{
    const RawMeasurement raw = load_measurement(manifest, s);
    const PreprocessResult pre = preprocess(raw, cfg.pipeline, cfg.acquisition);
    PreparedSample out;
    out.sample = s;
    out.velocity = extract_velocity(pre.map, cfg.velocity);
    if (cfg.need_1d)
        out.map_input = nn::map_input<float>(pre.map, cfg.input_1d);
    if (cfg.need_2d)
        out.volume_input = nn::volume_input<float>(pre.volume, cfg.input_2d);
    return out;
}

/// Loads and preprocesses every manifest sample, in manifest order.
inline std::vector<PreparedSample> prepare_samples(const Manifest& manifest, const PrepareConfig& cfg)
{
    std::vector<PreparedSample> out(manifest.samples.size());
    parallel_for(out.size(), [&](std::size_t i) { out[i] = prepare_sample(manifest, manifest.samples[i], cfg); });
    return out;
}

} // namespace oce::eval
