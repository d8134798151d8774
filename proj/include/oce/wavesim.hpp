#pragma once

// Synthetic wrapped-phase measurements of a needle-excited burst shear wave
// crossing the lateral field of view.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"
#include "oce/core/error.hpp"
#include "oce/core/json_util.hpp"
#include "oce/core/manifest.hpp"
#include "oce/core/parallel.hpp"
#include "oce/core/random.hpp"
#include "oce/core/seed.hpp"
#include "oce/core/tensor.hpp"
#include "oce/core/tensor_io.hpp"
#include "oce/core/types.hpp"

namespace oce {

/// v(c) = v_ref * (c / c_ref)^gamma
struct VelocityModel {
    double v_ref_mps = 2.5;
    double c_ref_pct = 8.3;
    double gamma = 1.25;
};

struct ExcitationSpec {
    double burst_cycles = 1.0;
    /// Width of the uniform excitation delay window; <= 0 means one
    /// excitation period.
    double delay_window_s = -1.0;
    /// Frames simulated beyond frames_kept (+1 for the frame lost to
    /// temporal differencing is added on top).
    std::size_t extra_frames = 112;
};

struct PhantomSpec {
    double concentration_pct = 8.3;
    VelocityModel velocity_model{};
    /// Multiplies the modelled velocity; models phantom-to-phantom variation.
    double velocity_scale = 1.0;
    std::size_t surface_index = 40;
    double amplitude_at_fov_m = 150e-9;
    double decay_exponent = 0.5;
    /// Distance at which the displacement amplitude equals amplitude_at_fov_m.
    double reference_distance_m = 5e-3;
    ExcitationSpec excitation{};
};

struct NoiseSpec {
    double phase_noise_sigma_rad = 0.005;
    double dead_row_fraction = 0.05;
    double dead_row_noise_sigma_rad = 1.0;
    double jitter_sigma_frames = 0.0;

    void validate() const
    {
        if (phase_noise_sigma_rad < 0 || dead_row_noise_sigma_rad < 0 || jitter_sigma_frames < 0 ||
            !(dead_row_fraction >= 0 && dead_row_fraction <= 1))
            throw Error(Errc::ConfigInvalid, "noise parameters out of range");
    }
};

struct RawMeasurement {
    Tensor phase;     ///< (y, z, t), wrapped to (-pi, pi]
    Tensor intensity; ///< (y, z), >= 0
    Sample sample;
    double acquisition_delay_s = 0.0;
    std::size_t surface_index = 0;
    double true_velocity_mps = 0.0;
};

inline double concentration_to_velocity(double concentration_pct, const VelocityModel& m)
{
    if (!(concentration_pct > 0.0))
        throw Error(Errc::NonPositiveConcentration, "concentration must be > 0, got " +
                                                        std::to_string(concentration_pct));
    return m.v_ref_mps * std::pow(concentration_pct / m.c_ref_pct, m.gamma);
}

/// Hann-windowed sinusoid of `cycles` periods starting at t = 0.
inline double burst_waveform(double t, double freq_hz, double cycles, double amplitude)
{
    const double duration = cycles / freq_hz;
    if (t < 0.0 || t > duration)
        return 0.0;
    const double carrier = std::sin(2.0 * std::numbers::pi * freq_hz * t);
    const double window = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * t / duration));
    return amplitude * carrier * window;
}

/// Largest float not exceeding pi; float(pi) itself rounds above pi.
inline constexpr float kPiBelow = 3.14159250f;

/// Maps a phase into (-pi, pi] and stores it as float without leaving the
/// interval through rounding.
inline float wrap_phase(double phi)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = phi - two_pi * std::ceil((phi - std::numbers::pi) / two_pi);
    if (w <= -std::numbers::pi)
        w += two_pi;
    float f = static_cast<float>(w);
    if (f > kPiBelow)
        f = kPiBelow;
    if (f < -kPiBelow)
        f = -kPiBelow;
    return f;
}

inline RawMeasurement simulate_measurement(const PhantomSpec& p, const AcquisitionConfig& a, const NoiseSpec& n,
                                           double needle_distance_m, std::uint64_t seed)
{
    a.validate();
    n.validate();
    if (!(needle_distance_m > 0.0))
        throw Error(Errc::ConfigInvalid, "needle distance must be positive");
    if (p.surface_index >= a.depth_pixels)
        throw Error(Errc::ConfigInvalid, "surface index outside depth range");
    if (p.amplitude_at_fov_m < 0 || p.excitation.burst_cycles < 1 || p.reference_distance_m <= 0 ||
        p.velocity_scale <= 0)
        throw Error(Errc::ConfigInvalid, "phantom parameters out of range");

    const double velocity = concentration_to_velocity(p.concentration_pct, p.velocity_model) * p.velocity_scale;
    if (!(velocity > 0.0))
        throw Error(Errc::ConfigInvalid, "non-positive wave velocity");

    const std::size_t ny = a.lateral_pixels;
    const std::size_t nz = a.depth_pixels;
    const std::size_t nt = a.frames_kept + p.excitation.extra_frames + 1;
    const double dt = a.frame_interval_s();
    const double pitch = a.pixel_pitch_m();
    const double phase_per_m = 4.0 * std::numbers::pi / a.wavelength_m;

    Rng rng(seed);
    const double window = p.excitation.delay_window_s > 0 ? p.excitation.delay_window_s : 1.0 / a.excitation_freq_hz;
    const double delay = rng.uniform() * window;

    std::vector<double> frame_time(nt);
    for (std::size_t k = 0; k < nt; ++k)
        frame_time[k] = (static_cast<double>(k) + n.jitter_sigma_frames * rng.normal()) * dt;

    // Dead rows are drawn among the gelatin rows (z >= surface).
    const std::size_t gel_rows = nz - p.surface_index;
    std::vector<char> dead(nz, 0);
    const auto dead_count = static_cast<std::size_t>(std::llround(n.dead_row_fraction * static_cast<double>(gel_rows)));
    {
        std::vector<std::size_t> rows(gel_rows);
        for (std::size_t i = 0; i < gel_rows; ++i)
            rows[i] = p.surface_index + i;
        rng.shuffle(rows.begin(), rows.end());
        for (std::size_t i = 0; i < dead_count; ++i)
            dead[rows[i]] = 1;
    }

    // Noise-free cumulative phase per lateral position and frame.
    std::vector<double> wave(ny * nt);
    for (std::size_t y = 0; y < ny; ++y) {
        const double r = needle_distance_m + static_cast<double>(y) * pitch;
        const double amp = p.amplitude_at_fov_m * std::pow(p.reference_distance_m / r, p.decay_exponent);
        for (std::size_t k = 0; k < nt; ++k)
            wave[y * nt + k] = phase_per_m * burst_waveform(frame_time[k] + delay - r / velocity,
                                                            a.excitation_freq_hz, p.excitation.burst_cycles, amp);
    }

    RawMeasurement out;
    out.phase = Tensor({ny, nz, nt}, "yzt");
    out.intensity = Tensor({ny, nz}, "yz");
    out.acquisition_delay_s = delay;
    out.surface_index = p.surface_index;
    out.true_velocity_mps = velocity;

    auto& phase = out.phase.storage();
    auto& intensity = out.intensity.storage();
    for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t z = 0; z < nz; ++z) {
            float* row = phase.data() + (y * nz + z) * nt;
            if (z < p.surface_index || dead[z]) {
                // air above the surface and decorrelated speckle carry no wave
                const double level = z < p.surface_index ? 0.01 : 0.02;
                intensity[y * nz + z] = static_cast<float>(level * std::abs(rng.normal()));
                for (std::size_t k = 0; k < nt; ++k)
                    row[k] = wrap_phase(n.dead_row_noise_sigma_rad * rng.normal());
            } else {
                intensity[y * nz + z] = static_cast<float>(std::abs(1.0 + 0.1 * rng.normal()));
                const double* w = wave.data() + y * nt;
                for (std::size_t k = 0; k < nt; ++k)
                    row[k] = wrap_phase(w[k] + n.phase_noise_sigma_rad * rng.normal());
            }
        }
    }
    out.sample.concentration_pct = p.concentration_pct;
    out.sample.needle_distance_m = needle_distance_m;
    out.sample.seed = seed;
    return out;
}

struct DatasetConfig {
    AcquisitionConfig acquisition{};
    std::vector<double> concentrations_pct{11.1, 8.3, 6.7, 5.6, 4.8, 4.2};
    std::vector<double> needle_distances_m{5e-3, 10e-3, 15e-3, 20e-3};
    int instances = 2;
    int orientations = 2;
    int repetitions = 4;
    VelocityModel velocity_model{};
    double instance_velocity_sigma = 0.03;
    double amplitude_at_fov_m = 150e-9;
    double decay_exponent = 0.5;
    std::size_t surface_index_min = 20;
    std::size_t surface_index_max = 60;
    NoiseSpec noise{};
    ExcitationSpec excitation{};

    void validate() const
    {
        acquisition.validate();
        noise.validate();
        if (concentrations_pct.empty())
            throw Error(Errc::ConfigInvalid, "at least one concentration required");
        for (double c : concentrations_pct)
            if (!(c > 0 && c < 100))
                throw Error(Errc::ConfigInvalid, "concentration outside (0, 100)");
        if (needle_distances_m.empty())
            throw Error(Errc::ConfigInvalid, "at least one needle distance required");
        for (double d : needle_distances_m)
            if (!(d > 0))
                throw Error(Errc::ConfigInvalid, "needle distance must be positive");
        if (instances < 1 || orientations < 1 || repetitions < 1)
            throw Error(Errc::ConfigInvalid, "instance/orientation/repetition counts must be >= 1");
        if (surface_index_min > surface_index_max || surface_index_max >= acquisition.depth_pixels)
            throw Error(Errc::ConfigInvalid, "surface index range invalid");
        if (instance_velocity_sigma < 0)
            throw Error(Errc::ConfigInvalid, "instance_velocity_sigma must be >= 0");
    }
};

inline void to_json(nlohmann::json& j, const DatasetConfig& c)
{
    j = {{"acquisition", c.acquisition},
         {"concentrations_pct", c.concentrations_pct},
         {"needle_distances_m", c.needle_distances_m},
         {"instances", c.instances},
         {"orientations", c.orientations},
         {"repetitions", c.repetitions},
         {"velocity_model",
          {{"v_ref_mps", c.velocity_model.v_ref_mps},
           {"c_ref_pct", c.velocity_model.c_ref_pct},
           {"gamma", c.velocity_model.gamma}}},
         {"instance_velocity_sigma", c.instance_velocity_sigma},
         {"amplitude_at_fov_m", c.amplitude_at_fov_m},
         {"decay_exponent", c.decay_exponent},
         {"surface_index_min", c.surface_index_min},
         {"surface_index_max", c.surface_index_max},
         {"noise",
          {{"phase_noise_sigma_rad", c.noise.phase_noise_sigma_rad},
           {"dead_row_fraction", c.noise.dead_row_fraction},
           {"dead_row_noise_sigma_rad", c.noise.dead_row_noise_sigma_rad},
           {"jitter_sigma_frames", c.noise.jitter_sigma_frames}}},
         {"excitation",
          {{"burst_cycles", c.excitation.burst_cycles},
           {"delay_window_s", c.excitation.delay_window_s},
           {"extra_frames", c.excitation.extra_frames}}}};
}

inline void from_json(const nlohmann::json& j, DatasetConfig& c)
{
    using json_util::read_opt;
    json_util::reject_unknown(j,
                              {"acquisition", "concentrations_pct", "needle_distances_m", "instances", "orientations",
                               "repetitions", "velocity_model", "instance_velocity_sigma", "amplitude_at_fov_m",
                               "decay_exponent", "surface_index_min", "surface_index_max", "noise", "excitation"},
                              "dataset config");
    if (j.contains("acquisition"))
        from_json(j.at("acquisition"), c.acquisition);
    read_opt(j, "concentrations_pct", c.concentrations_pct);
    read_opt(j, "needle_distances_m", c.needle_distances_m);
    read_opt(j, "instances", c.instances);
    read_opt(j, "orientations", c.orientations);
    read_opt(j, "repetitions", c.repetitions);
    if (j.contains("velocity_model")) {
        const auto& v = j.at("velocity_model");
        json_util::reject_unknown(v, {"v_ref_mps", "c_ref_pct", "gamma"}, "velocity_model");
        read_opt(v, "v_ref_mps", c.velocity_model.v_ref_mps);
        read_opt(v, "c_ref_pct", c.velocity_model.c_ref_pct);
        read_opt(v, "gamma", c.velocity_model.gamma);
    }
    read_opt(j, "instance_velocity_sigma", c.instance_velocity_sigma);
    read_opt(j, "amplitude_at_fov_m", c.amplitude_at_fov_m);
    read_opt(j, "decay_exponent", c.decay_exponent);
    read_opt(j, "surface_index_min", c.surface_index_min);
    read_opt(j, "surface_index_max", c.surface_index_max);
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        json_util::reject_unknown(
            n, {"phase_noise_sigma_rad", "dead_row_fraction", "dead_row_noise_sigma_rad", "jitter_sigma_frames"},
            "noise");
        read_opt(n, "phase_noise_sigma_rad", c.noise.phase_noise_sigma_rad);
        read_opt(n, "dead_row_fraction", c.noise.dead_row_fraction);
        read_opt(n, "dead_row_noise_sigma_rad", c.noise.dead_row_noise_sigma_rad);
        read_opt(n, "jitter_sigma_frames", c.noise.jitter_sigma_frames);
    }
    if (j.contains("excitation")) {
        const auto& e = j.at("excitation");
        json_util::reject_unknown(e, {"burst_cycles", "delay_window_s", "extra_frames"}, "excitation");
        read_opt(e, "burst_cycles", c.excitation.burst_cycles);
        read_opt(e, "delay_window_s", c.excitation.delay_window_s);
        read_opt(e, "extra_frames", c.excitation.extra_frames);
    }
}

inline std::string make_sample_id(double concentration_pct, double needle_distance_m, int instance, int orientation,
                                  int repetition)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "c%05.2f-d%02d-i%d-o%d-r%d", concentration_pct,
                  static_cast<int>(std::lround(needle_distance_m * 1e3)), instance, orientation, repetition);
    return buf;
}

/// Enumerates dataset samples and the phantom spec used for each, in
/// manifest order (concentration, distance, instance, orientation, repetition).
struct PlannedSample {
    Sample sample;
    PhantomSpec phantom;
};

inline std::vector<PlannedSample> plan_dataset(const DatasetConfig& cfg, std::uint64_t master_seed)
{
    cfg.validate();
    std::vector<PlannedSample> plan;
    const double r0 = *std::min_element(cfg.needle_distances_m.begin(), cfg.needle_distances_m.end());
    for (double c : cfg.concentrations_pct) {
        for (double d : cfg.needle_distances_m) {
            for (int inst = 0; inst < cfg.instances; ++inst) {
                char key[64];
                std::snprintf(key, sizeof key, "instance:%.4f:%d", c, inst);
                Rng instance_rng(derive_sample_seed(master_seed, key));
                double scale = instance_rng.normal(1.0, cfg.instance_velocity_sigma);
                if (scale < 0.5)
                    scale = 0.5;
                for (int o = 0; o < cfg.orientations; ++o) {
                    std::snprintf(key, sizeof key, "surface:%.4f:%d:%d", c, inst, o);
                    Rng surface_rng(derive_sample_seed(master_seed, key));
                    const std::size_t span = cfg.surface_index_max - cfg.surface_index_min + 1;
                    const std::size_t surface = cfg.surface_index_min + surface_rng.below(span);
                    for (int rep = 0; rep < cfg.repetitions; ++rep) {
                        PlannedSample ps;
                        auto& s = ps.sample;
                        s.id = make_sample_id(c, d, inst, o, rep);
                        s.concentration_pct = c;
                        s.needle_distance_m = d;
                        s.instance_id = inst;
                        s.orientation_id = o;
                        s.repetition_id = rep;
                        s.seed = derive_sample_seed(master_seed, s.id);
                        s.tensor_path = "tensors/" + s.id + ".phase.tnsr";
                        s.intensity_path = "tensors/" + s.id + ".intensity.tnsr";
                        auto& p = ps.phantom;
                        p.concentration_pct = c;
                        p.velocity_model = cfg.velocity_model;
                        p.velocity_scale = scale;
                        p.surface_index = surface;
                        p.amplitude_at_fov_m = cfg.amplitude_at_fov_m;
                        p.decay_exponent = cfg.decay_exponent;
                        p.reference_distance_m = r0;
                        p.excitation = cfg.excitation;
                        plan.push_back(std::move(ps));
                    }
                }
            }
        }
    }
    return plan;
}

inline nlohmann::json measurement_meta(const RawMeasurement& m, const AcquisitionConfig& a)
{
    return {{"sample_id", m.sample.id},
            {"surface_index", m.surface_index},
            {"acquisition_delay_s", m.acquisition_delay_s},
            {"true_velocity_mps", m.true_velocity_mps},
            {"frame_interval_s", a.frame_interval_s()},
            {"pixel_pitch_m", a.pixel_pitch_m()}};
}

/// Writes tensors/<id>.phase.tnsr, tensors/<id>.intensity.tnsr and
/// manifest.json under `out_dir`; returns the manifest records.
inline std::vector<Sample> generate_dataset(const DatasetConfig& cfg, std::uint64_t master_seed,
                                            const std::filesystem::path& out_dir)
{
    const auto plan = plan_dataset(cfg, master_seed);
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "tensors", ec);
    if (ec)
        throw Error(Errc::IoError, "cannot create " + (out_dir / "tensors").string() + ": " + ec.message());

    parallel_for(plan.size(), [&](std::size_t i) {
        const auto& ps = plan[i];
        RawMeasurement m =
            simulate_measurement(ps.phantom, cfg.acquisition, cfg.noise, ps.sample.needle_distance_m, ps.sample.seed);
        m.sample = ps.sample;
        const auto meta = measurement_meta(m, cfg.acquisition);
        write_tensor(out_dir / ps.sample.tensor_path, m.phase, meta);
        write_tensor(out_dir / ps.sample.intensity_path, m.intensity, meta);
    });

    std::vector<Sample> samples;
    samples.reserve(plan.size());
    for (const auto& ps : plan)
        samples.push_back(ps.sample);
    write_manifest(out_dir / "manifest.json", samples);
    return samples;
}

/// Loads a measurement written by generate_dataset.
inline RawMeasurement load_measurement(const Manifest& manifest, const Sample& s)
{
    const auto phase_path = manifest.resolve(s.tensor_path);
    if (!std::filesystem::exists(phase_path))
        throw Error(Errc::IoError, "missing tensor file " + phase_path.string());
    auto phase = read_tensor_file(phase_path);
    RawMeasurement m;
    m.phase = std::move(phase.tensor);
    if (m.phase.axes() != "yzt")
        throw Error(Errc::ShapeMismatch, "phase tensor must have axes yzt: " + phase_path.string());
    m.sample = s;
    m.surface_index = phase.meta.value("surface_index", std::size_t{0});
    m.acquisition_delay_s = phase.meta.value("acquisition_delay_s", 0.0);
    m.true_velocity_mps = phase.meta.value("true_velocity_mps", 0.0);
    if (!s.intensity_path.empty()) {
        const auto ipath = manifest.resolve(s.intensity_path);
        if (!std::filesystem::exists(ipath))
            throw Error(Errc::IoError, "missing tensor file " + ipath.string());
        m.intensity = read_tensor(ipath);
    } else {
        m.intensity = Tensor({m.phase.extent(0), m.phase.extent(1)}, "yz", 1.0f);
    }
    return m;
}

} // namespace oce
