#pragma once

// Conversion of preprocessed phase data into network inputs.

#include <cstddef>

#include "oce/core/tensor.hpp"
#include "oce/nn/layer.hpp"
#include "oce/phasepipe.hpp"

namespace oce::nn {

/// Target extents after adaptive average pooling; 0 keeps an axis as is.
/// Values are multiplied by `scale` (a fixed global constant, not a
/// per-sample statistic).
struct InputSpec {
    std::size_t lateral_bins = 0;
    std::size_t depth_bins = 32;
    std::size_t frame_bins = 0;
    double scale = 1.0 / 0.1;
};

inline void to_json(nlohmann::json& j, const InputSpec& s)
{
    j = {{"lateral_bins", s.lateral_bins},
         {"depth_bins", s.depth_bins},
         {"frame_bins", s.frame_bins},
         {"scale", s.scale}};
}

inline void from_json(const nlohmann::json& j, InputSpec& s)
{
    json_util::reject_unknown(j, {"lateral_bins", "depth_bins", "frame_bins", "scale"}, "input");
    json_util::read_opt(j, "lateral_bins", s.lateral_bins);
    json_util::read_opt(j, "depth_bins", s.depth_bins);
    json_util::read_opt(j, "frame_bins", s.frame_bins);
    json_util::read_opt(j, "scale", s.scale);
}

/// Bin b of an adaptive pool over `len` elements covers
/// [floor(b * len / bins), ceil((b + 1) * len / bins)).
inline std::pair<std::size_t, std::size_t> adaptive_bin(std::size_t b, std::size_t len, std::size_t bins)
{
    return {b * len / bins, ((b + 1) * len + bins - 1) / bins};
}

namespace detail {

/// Adaptive average pool of a dense (e0, e1, e2) array.
template <typename T>
std::vector<T> adaptive_pool3(const float* src, const std::array<std::size_t, 3>& ext,
                              const std::array<std::size_t, 3>& bins, double scale)
{
    std::vector<T> out(bins[0] * bins[1] * bins[2]);
    for (std::size_t b0 = 0; b0 < bins[0]; ++b0) {
        const auto [l0, h0] = adaptive_bin(b0, ext[0], bins[0]);
        for (std::size_t b1 = 0; b1 < bins[1]; ++b1) {
            const auto [l1, h1] = adaptive_bin(b1, ext[1], bins[1]);
            for (std::size_t b2 = 0; b2 < bins[2]; ++b2) {
                const auto [l2, h2] = adaptive_bin(b2, ext[2], bins[2]);
                double s = 0.0;
                for (std::size_t i0 = l0; i0 < h0; ++i0)
                    for (std::size_t i1 = l1; i1 < h1; ++i1)
                        for (std::size_t i2 = l2; i2 < h2; ++i2)
                            s += src[(i0 * ext[1] + i1) * ext[2] + i2];
                const double n = static_cast<double>((h0 - l0) * (h1 - l1) * (h2 - l2));
                out[(b0 * bins[1] + b1) * bins[2] + b2] = static_cast<T>(scale * s / n);
            }
        }
    }
    return out;
}

inline std::size_t bins_or(std::size_t bins, std::size_t len) { return bins == 0 ? len : bins; }

} // namespace detail

/// (y, t) map -> 1D+t input with extents {1, y, t}.
template <typename T>
Feature<T> map_input(const SpatioTemporalMap& map, const InputSpec& spec)
{
    const std::array<std::size_t, 3> ext{1, map.lateral(), map.frames()};
    const std::array<std::size_t, 3> bins{1, detail::bins_or(spec.lateral_bins, ext[1]),
                                          detail::bins_or(spec.frame_bins, ext[2])};
    return Feature<T>(Shape{1, bins}, detail::adaptive_pool3<T>(map.values.values().data(), ext, bins, spec.scale));
}

/// (y, z, t) volume -> 2D+t input with extents {y, z, t}.
template <typename T>
Feature<T> volume_input(const Tensor& volume, const InputSpec& spec)
{
    if (volume.rank() != 3 || volume.axes() != "yzt")
        throw Error(Errc::ShapeMismatch, "expected a (y, z, t) volume");
    const std::array<std::size_t, 3> ext{volume.extent(0), volume.extent(1), volume.extent(2)};
    const std::array<std::size_t, 3> bins{detail::bins_or(spec.lateral_bins, ext[0]),
                                          detail::bins_or(spec.depth_bins, ext[1]),
                                          detail::bins_or(spec.frame_bins, ext[2])};
    return Feature<T>(Shape{1, bins}, detail::adaptive_pool3<T>(volume.values().data(), ext, bins, spec.scale));
}

} // namespace oce::nn
