#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "oce/core/error.hpp"
#include "oce/core/json_util.hpp"

namespace oce {

/// Geometry and timing of the OCT acquisition.
struct AcquisitionConfig {
    double frame_rate_hz = 30000.0;
    double ascan_rate_hz = 1.59e6;
    double wavelength_m = 1315e-9;
    std::size_t lateral_pixels = 32;
    std::size_t depth_pixels = 250;
    double fov_lateral_m = 3e-3;
    double fov_depth_m = 2e-3;
    std::size_t frames_kept = 400;
    double excitation_freq_hz = 100.0;
    double needle_amplitude_m = 50e-6;

    double pixel_pitch_m() const { return fov_lateral_m / static_cast<double>(lateral_pixels); }
    double frame_interval_s() const { return 1.0 / frame_rate_hz; }

    void validate() const
    {
        const bool ok = frame_rate_hz > 0 && ascan_rate_hz > 0 && wavelength_m > 0 && lateral_pixels > 0 &&
                        depth_pixels > 0 && fov_lateral_m > 0 && fov_depth_m > 0 && frames_kept > 0 &&
                        excitation_freq_hz > 0 && needle_amplitude_m > 0;
        if (!ok)
            throw Error(Errc::ConfigInvalid, "acquisition parameters must be strictly positive");
    }
};

inline void to_json(nlohmann::json& j, const AcquisitionConfig& a)
{
    j = {{"frame_rate_hz", a.frame_rate_hz},       {"ascan_rate_hz", a.ascan_rate_hz},
         {"wavelength_m", a.wavelength_m},         {"lateral_pixels", a.lateral_pixels},
         {"depth_pixels", a.depth_pixels},         {"fov_lateral_m", a.fov_lateral_m},
         {"fov_depth_m", a.fov_depth_m},           {"frames_kept", a.frames_kept},
         {"excitation_freq_hz", a.excitation_freq_hz}, {"needle_amplitude_m", a.needle_amplitude_m}};
}

inline void from_json(const nlohmann::json& j, AcquisitionConfig& a)
{
    json_util::reject_unknown(j,
                              {"frame_rate_hz", "ascan_rate_hz", "wavelength_m", "lateral_pixels", "depth_pixels",
                               "fov_lateral_m", "fov_depth_m", "frames_kept", "excitation_freq_hz",
                               "needle_amplitude_m"},
                              "acquisition");
    using json_util::read_opt;
    read_opt(j, "frame_rate_hz", a.frame_rate_hz);
    read_opt(j, "ascan_rate_hz", a.ascan_rate_hz);
    read_opt(j, "wavelength_m", a.wavelength_m);
    read_opt(j, "lateral_pixels", a.lateral_pixels);
    read_opt(j, "depth_pixels", a.depth_pixels);
    read_opt(j, "fov_lateral_m", a.fov_lateral_m);
    read_opt(j, "fov_depth_m", a.fov_depth_m);
    read_opt(j, "frames_kept", a.frames_kept);
    read_opt(j, "excitation_freq_hz", a.excitation_freq_hz);
    read_opt(j, "needle_amplitude_m", a.needle_amplitude_m);
}

/// One measurement in a dataset manifest. Paths are relative to the
/// manifest's directory.
struct Sample {
    std::string id;
    double concentration_pct = 0.0;
    double needle_distance_m = 0.0;
    int instance_id = 0;
    int orientation_id = 0;
    int repetition_id = 0;
    std::uint64_t seed = 0;
    std::string tensor_path;
    std::string intensity_path;

    void validate() const
    {
        if (!(concentration_pct > 0.0 && concentration_pct < 100.0))
            throw Error(Errc::ConfigInvalid, "sample " + id + ": concentration outside (0, 100)");
        if (!(needle_distance_m > 0.0))
            throw Error(Errc::ConfigInvalid, "sample " + id + ": needle distance must be positive");
    }

    friend bool operator==(const Sample&, const Sample&) = default;
};

inline void to_json(nlohmann::json& j, const Sample& s)
{
    j = {{"id", s.id},
         {"concentration_pct", s.concentration_pct},
         {"needle_distance_m", s.needle_distance_m},
         {"instance_id", s.instance_id},
         {"orientation_id", s.orientation_id},
         {"repetition_id", s.repetition_id},
         {"seed", s.seed},
         {"tensor_path", s.tensor_path},
         {"intensity_path", s.intensity_path}};
}

inline void from_json(const nlohmann::json& j, Sample& s)
{
    j.at("id").get_to(s.id);
    j.at("concentration_pct").get_to(s.concentration_pct);
    j.at("needle_distance_m").get_to(s.needle_distance_m);
    s.instance_id = j.value("instance_id", 0);
    s.orientation_id = j.value("orientation_id", 0);
    s.repetition_id = j.value("repetition_id", 0);
    j.at("seed").get_to(s.seed);
    j.at("tensor_path").get_to(s.tensor_path);
    s.intensity_path = j.value("intensity_path", std::string{});
}

} // namespace oce
