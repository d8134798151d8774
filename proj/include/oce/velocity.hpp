#pragma once

// Wavefront tracking on the depth-averaged map and time-of-flight velocity.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "oce/core/error.hpp"
#include "oce/phasepipe.hpp"

namespace oce {

struct DetectorConfig {
    double threshold_k = 4.0;
    double noise_floor_rad = 1e-4;
    std::size_t noise_window = 10;
    /// A peak must dominate |map| over +/- this many frames.
    std::size_t peak_halfwidth = 10;
    /// A peak must also reach this fraction of the pixel's maximum |map|.
    double relative_threshold = 0.25;
};

struct WavefrontTrack {
    std::vector<double> arrival_frame;
    std::vector<double> confidence;
    std::vector<char> valid;

    std::size_t valid_count() const { return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1)); }
};

struct VelocityEstimate {
    double v_px_per_frame = 0.0;
    double v_mps = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

/// Vertex offset in [-0.5, 0.5] of the parabola through (-1, a), (0, b), (1, c).
inline double parabolic_offset(double a, double b, double c)
{
    const double den = a - 2.0 * b + c;
    if (den >= 0.0)
        return 0.0;
    return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

/// First significant peak of |map[y, .]| per lateral pixel.
inline WavefrontTrack detect_arrival_times(const SpatioTemporalMap& map, const DetectorConfig& cfg = {})
{
    const std::size_t ny = map.lateral();
    const std::size_t nt = map.frames();
    WavefrontTrack track;
    track.arrival_frame.assign(ny, 0.0);
    track.confidence.assign(ny, 0.0);
    track.valid.assign(ny, 0);
    if (nt < 3)
        throw Error(Errc::NoWavefront, "map too short for peak detection");

    std::vector<double> mag(nt);
    const std::size_t window = std::min(cfg.noise_window, nt);
    for (std::size_t y = 0; y < ny; ++y) {
        double peak_max = 0.0;
        for (std::size_t t = 0; t < nt; ++t) {
            mag[t] = std::abs(static_cast<double>(map.values(y, t)));
            peak_max = std::max(peak_max, mag[t]);
        }
        double power = 0.0;
        for (std::size_t t = 0; t < window; ++t)
            power += mag[t] * mag[t];
        const double sigma = std::sqrt(power / static_cast<double>(window));
        const double threshold =
            std::max(cfg.threshold_k * sigma + cfg.noise_floor_rad, cfg.relative_threshold * peak_max);

        for (std::size_t t = 1; t + 1 < nt; ++t) {
            if (!(mag[t] > threshold))
                continue;
            const std::size_t lo = t > cfg.peak_halfwidth ? t - cfg.peak_halfwidth : 0;
            const std::size_t hi = std::min(nt - 1, t + cfg.peak_halfwidth);
            bool dominant = true;
            for (std::size_t s = lo; s <= hi && dominant; ++s)
                dominant = s == t || (s < t ? mag[s] < mag[t] : mag[s] <= mag[t]);
            if (!dominant)
                continue;
            const double base = *std::min_element(mag.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  mag.begin() + static_cast<std::ptrdiff_t>(t));
            track.arrival_frame[y] = static_cast<double>(t) + parabolic_offset(mag[t - 1], mag[t], mag[t + 1]);
            track.confidence[y] = mag[t] - base;
            track.valid[y] = 1;
            break;
        }
    }
    if (track.valid_count() < 2)
        throw Error(Errc::NoWavefront, "fewer than two lateral pixels show a wavefront");
    return track;
}

/// Least-squares line arrival = a + b * y over valid pixels; velocity = 1 / b.
inline VelocityEstimate fit_velocity(const WavefrontTrack& track, double pixel_pitch_m, double frame_interval_s)
{
    double n = 0, sy = 0, st = 0;
    for (std::size_t y = 0; y < track.valid.size(); ++y)
        if (track.valid[y]) {
            n += 1;
            sy += static_cast<double>(y);
            st += track.arrival_frame[y];
        }
    if (n < 2)
        throw Error(Errc::TooFewPoints, "need at least two valid arrival times");
    const double my = sy / n, mt = st / n;
    double syy = 0, syt = 0, stt = 0;
    for (std::size_t y = 0; y < track.valid.size(); ++y)
        if (track.valid[y]) {
            const double dy = static_cast<double>(y) - my;
            const double dt = track.arrival_frame[y] - mt;
            syy += dy * dy;
            syt += dy * dt;
            stt += dt * dt;
        }
    if (stt == 0.0)
        throw Error(Errc::DegenerateTrack, "all arrival times equal (infinite velocity)");
    if (syy == 0.0)
        throw Error(Errc::TooFewPoints, "valid points share one lateral position");
    const double slope = syt / syy; // frames per pixel
    if (!(slope > 0.0))
        throw Error(Errc::DegenerateTrack, "wavefront does not advance with lateral position");

    VelocityEstimate est;
    est.n_points = static_cast<std::size_t>(n);
    est.v_px_per_frame = 1.0 / slope;
    est.v_mps = est.v_px_per_frame * pixel_pitch_m / frame_interval_s;
    est.r_squared = std::clamp(syt * syt / (syy * stt), 0.0, 1.0);
    return est;
}

/// Velocity feature for regression; failed extractions carry a reason.
struct VelocityFeature {
    std::optional<VelocityEstimate> estimate;
    std::string failure;

    bool ok() const { return estimate.has_value(); }
};

struct VelocityConfig {
    DetectorConfig detector{};
    /// Fits below this coefficient of determination count as failed extractions.
    double min_r_squared = 0.5;
    /// Fits through fewer valid pixels count as failed extractions.
    std::size_t min_points = 8;
};

inline VelocityFeature extract_velocity(const SpatioTemporalMap& map, const VelocityConfig& cfg = {})
{
    VelocityFeature f;
    try {
        const auto track = detect_arrival_times(map, cfg.detector);
        const auto est = fit_velocity(track, map.pixel_pitch_m, map.frame_interval_s);
        if (est.r_squared < cfg.min_r_squared || est.n_points < cfg.min_points) {
            f.failure = "LowFitQuality";
            return f;
        }
        f.estimate = est;
    } catch (const Error& e) {
        f.failure = std::string(errc_name(e.code()));
    }
    return f;
}

} // namespace oce
