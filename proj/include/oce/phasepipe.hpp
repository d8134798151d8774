#pragma once

// Phase preprocessing: temporal unwrapping, frame-to-frame differencing,
// low-quality row elimination, 3x3x3 median filtering and depth averaging.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "oce/core/error.hpp"
#include "oce/core/tensor.hpp"
#include "oce/core/types.hpp"
#include "oce/wavesim.hpp"

namespace oce {

using RowMask = std::vector<char>;

/// Depth-averaged lateral-position x time representation.
struct SpatioTemporalMap {
    Tensor values; ///< (y, t)
    double frame_interval_s = 1.0 / 30000.0;
    double pixel_pitch_m = 3e-3 / 32.0;

    std::size_t lateral() const { return values.extent(0); }
    std::size_t frames() const { return values.extent(1); }
};

struct PipelineConfig {
    std::size_t frames_kept = 400;
    double threshold_quantile = 0.1;
};

struct PreprocessResult {
    Tensor volume; ///< (y, z, t) filtered phase differences, masked rows removed
    SpatioTemporalMap map;
    RowMask row_mask; ///< keep flags over the cropped depth rows
};

/// Maps a phase step into (-pi, pi].
inline double wrap_step(double d)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = d - two_pi * std::ceil((d - std::numbers::pi) / two_pi);
    if (w <= -std::numbers::pi)
        w += two_pi;
    return w;
}

inline std::vector<double> unwrap_temporal(std::span<const double> series)
{
    std::vector<double> out(series.size());
    if (series.empty())
        return out;
    out[0] = series[0];
    for (std::size_t k = 1; k < series.size(); ++k)
        out[k] = out[k - 1] + wrap_step(series[k] - series[k - 1]);
    return out;
}

/// Unwraps every (y, z) pixel along t; accumulates in double.
template <typename T>
BasicTensor<double> unwrap_volume(const BasicTensor<T>& vol)
{
    const std::size_t t_axis = vol.axis_index('t');
    if (t_axis != vol.rank() - 1)
        throw Error(Errc::ShapeMismatch, "time must be the last axis");
    const std::size_t nt = vol.extent(t_axis);
    BasicTensor<double> out(vol.shape(), vol.axes());
    const auto in = vol.values();
    auto o = out.values();
    for (std::size_t base = 0; base < in.size(); base += nt) {
        double acc = in[base];
        o[base] = acc;
        for (std::size_t k = 1; k < nt; ++k) {
            acc += wrap_step(static_cast<double>(in[base + k]) - static_cast<double>(in[base + k - 1]));
            o[base + k] = acc;
        }
    }
    return out;
}

template <typename T>
Tensor temporal_phase_difference(const BasicTensor<T>& vol)
{
    const std::size_t t_axis = vol.axis_index('t');
    if (t_axis != vol.rank() - 1)
        throw Error(Errc::ShapeMismatch, "time must be the last axis");
    const std::size_t nt = vol.extent(t_axis);
    if (nt < 2)
        throw Error(Errc::TooFewFrames, "phase difference needs at least 2 frames");
    auto shape = vol.shape();
    shape.back() = nt - 1;
    Tensor out(shape, vol.axes());
    const auto in = vol.values();
    auto o = out.values();
    std::size_t w = 0;
    for (std::size_t base = 0; base < in.size(); base += nt)
        for (std::size_t k = 0; k + 1 < nt; ++k)
            o[w++] = static_cast<float>(static_cast<double>(in[base + k + 1]) - static_cast<double>(in[base + k]));
    return out;
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted values.
inline double quantile(std::vector<double> values, double q)
{
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Keeps depth row z iff its mean intensity over y reaches the
/// `threshold_quantile` quantile of all row means.
inline RowMask row_quality_mask(const Tensor& intensity, double threshold_quantile)
{
    if (!(threshold_quantile >= 0.0 && threshold_quantile < 1.0))
        throw Error(Errc::ConfigInvalid, "threshold quantile must lie in [0, 1)");
    const std::size_t ny = intensity.extent_of('y');
    const std::size_t nz = intensity.extent_of('z');
    if (intensity.axes() != "yz")
        throw Error(Errc::ShapeMismatch, "intensity must have axes yz");
    std::vector<double> means(nz, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t z = 0; z < nz; ++z)
            means[z] += intensity(y, z);
    for (auto& m : means)
        m /= static_cast<double>(ny);
    const double threshold = quantile(means, threshold_quantile);
    RowMask keep(nz, 0);
    bool any = false;
    for (std::size_t z = 0; z < nz; ++z) {
        keep[z] = means[z] >= threshold ? 1 : 0;
        any = any || keep[z];
    }
    if (!any) {
        // floating-point corner case: keep the best row
        const auto best = std::max_element(means.begin(), means.end()) - means.begin();
        keep[static_cast<std::size_t>(best)] = 1;
    }
    return keep;
}

namespace detail {

struct Comparator {
    std::uint8_t lo, hi;
};

/// Batcher odd-even merge sort network on 32 wires, pruned to the
/// comparators that can influence wire `target`.
inline std::vector<Comparator> selection_network_32(std::size_t target)
{
    constexpr std::size_t n = 32;
    std::vector<Comparator> full;
    for (std::size_t p = 1; p < n; p <<= 1)
        for (std::size_t k = p; k >= 1; k >>= 1)
            for (std::size_t j = k % p; j + k < n; j += 2 * k)
                for (std::size_t i = 0; i < std::min(k, n - j - k); ++i)
                    if ((i + j) / (2 * p) == (i + j + k) / (2 * p))
                        full.push_back({static_cast<std::uint8_t>(i + j), static_cast<std::uint8_t>(i + j + k)});
    std::array<bool, n> needed{};
    needed[target] = true;
    std::vector<Comparator> kept;
    for (auto it = full.rbegin(); it != full.rend(); ++it) {
        if (needed[it->lo] || needed[it->hi]) {
            needed[it->lo] = needed[it->hi] = true;
            kept.push_back(*it);
        }
    }
    std::reverse(kept.begin(), kept.end());
    return kept;
}

} // namespace detail

/// Exact 3x3x3 median (14th order statistic of 27) with edge replication.
/// Runs a sorting network over blocks of consecutive voxels along the last
/// axis; the 27 samples are padded to 32 with three -inf and two +inf, so
/// the median lands on wire 16.
inline Tensor median_filter_3(const Tensor& vol)
{
    if (vol.rank() != 3)
        throw Error(Errc::ShapeMismatch, "median filter expects a rank-3 volume");
    static const std::vector<detail::Comparator> network = detail::selection_network_32(16);
    constexpr std::size_t block = 64;

    const std::size_t n0 = vol.extent(0), n1 = vol.extent(1), n2 = vol.extent(2);
    Tensor out(vol.shape(), vol.axes());
    const float* in = vol.values().data();
    float* o = out.values().data();

    auto clamp_index = [](std::size_t i, int d, std::size_t n) {
        const auto j = static_cast<std::ptrdiff_t>(i) + d;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 1));
    };

    alignas(64) float wires[32][block];
    constexpr float inf = std::numeric_limits<float>::infinity();
    for (std::size_t w = 27; w < 30; ++w)
        std::fill_n(wires[w], block, -inf);
    for (std::size_t w = 30; w < 32; ++w)
        std::fill_n(wires[w], block, inf);

    std::array<const float*, 9> rows{};
    for (std::size_t a = 0; a < n0; ++a) {
        for (std::size_t b = 0; b < n1; ++b) {
            std::size_t r = 0;
            for (int da = -1; da <= 1; ++da)
                for (int db = -1; db <= 1; ++db)
                    rows[r++] = in + (clamp_index(a, da, n0) * n1 + clamp_index(b, db, n1)) * n2;
            float* dst = o + (a * n1 + b) * n2;
            for (std::size_t c0 = 0; c0 < n2; c0 += block) {
                const std::size_t len = std::min(block, n2 - c0);
                for (std::size_t r9 = 0; r9 < 9; ++r9) {
                    const float* row = rows[r9];
                    for (std::size_t i = 0; i < len; ++i) {
                        const std::size_t c = c0 + i;
                        wires[3 * r9][i] = row[c == 0 ? 0 : c - 1];
                        wires[3 * r9 + 1][i] = row[c];
                        wires[3 * r9 + 2][i] = row[c + 1 == n2 ? c : c + 1];
                    }
                }
                for (const auto& cmp : network) {
                    float* x = wires[cmp.lo];
                    float* y = wires[cmp.hi];
                    for (std::size_t i = 0; i < block; ++i) {
                        const float lo = std::min(x[i], y[i]);
                        const float hi = std::max(x[i], y[i]);
                        x[i] = lo;
                        y[i] = hi;
                    }
                }
                std::copy_n(wires[16], len, dst + c0);
                // restore padding wires the network permuted
                for (std::size_t w = 27; w < 30; ++w)
                    std::fill_n(wires[w], block, -inf);
                for (std::size_t w = 30; w < 32; ++w)
                    std::fill_n(wires[w], block, inf);
            }
        }
    }
    return out;
}

namespace detail {

/// Copies the index range [first, first + count) of `axis`.
template <typename T>
BasicTensor<T> slice_axis(const BasicTensor<T>& t, std::size_t axis, std::size_t first, std::size_t count)
{
    auto shape = t.shape();
    const std::size_t full = shape[axis];
    shape[axis] = count;
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i)
        outer *= t.shape()[i];
    for (std::size_t i = axis + 1; i < t.rank(); ++i)
        inner *= t.shape()[i];
    BasicTensor<T> out(shape, t.axes());
    const auto in = t.values();
    auto o = out.values();
    for (std::size_t a = 0; a < outer; ++a)
        std::copy_n(in.begin() + static_cast<std::ptrdiff_t>((a * full + first) * inner), count * inner,
                    o.begin() + static_cast<std::ptrdiff_t>(a * count * inner));
    return out;
}

} // namespace detail

/// Drops depth rows above the phantom surface; z = 0 of the result is the surface.
template <typename T>
BasicTensor<T> crop_above_surface(const BasicTensor<T>& vol, std::size_t surface_index)
{
    const std::size_t z_axis = vol.axis_index('z');
    const std::size_t nz = vol.extent(z_axis);
    if (surface_index >= nz)
        throw Error(Errc::IndexOutOfRange, "surface index " + std::to_string(surface_index) +
                                               " outside depth extent " + std::to_string(nz));
    return detail::slice_axis(vol, z_axis, surface_index, nz - surface_index);
}

/// Keeps the first `frames_kept` frames.
template <typename T>
BasicTensor<T> crop_frames(const BasicTensor<T>& vol, std::size_t frames_kept = 400)
{
    const std::size_t t_axis = vol.axis_index('t');
    if (vol.extent(t_axis) < frames_kept || frames_kept == 0)
        throw Error(Errc::TooFewFrames, "cannot keep " + std::to_string(frames_kept) + " of " +
                                            std::to_string(vol.extent(t_axis)) + " frames");
    return detail::slice_axis(vol, t_axis, 0, frames_kept);
}

/// Removes masked depth rows from a (y, z, t) volume.
inline Tensor eliminate_rows(const Tensor& vol, const RowMask& keep)
{
    const std::size_t ny = vol.extent(0), nz = vol.extent(1), nt = vol.extent(2);
    if (vol.axes() != "yzt" || keep.size() != nz)
        throw Error(Errc::ShapeMismatch, "row mask does not match volume depth");
    const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 1));
    if (kept == 0)
        throw Error(Errc::AllRowsMasked, "no depth row survives the quality mask");
    Tensor out({ny, kept, nt}, "yzt");
    const auto in = vol.values();
    auto o = out.values();
    std::size_t w = 0;
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t z = 0; z < nz; ++z)
            if (keep[z]) {
                std::copy_n(in.begin() + static_cast<std::ptrdiff_t>((y * nz + z) * nt), nt,
                            o.begin() + static_cast<std::ptrdiff_t>(w));
                w += nt;
            }
    return out;
}

/// Mean over unmasked depth rows.
inline SpatioTemporalMap axial_mean(const Tensor& vol, const RowMask& keep, double frame_interval_s = 1.0 / 30000.0,
                                    double pixel_pitch_m = 3e-3 / 32.0)
{
    if (vol.axes() != "yzt")
        throw Error(Errc::ShapeMismatch, "axial mean expects a (y, z, t) volume");
    const std::size_t ny = vol.extent(0), nz = vol.extent(1), nt = vol.extent(2);
    if (keep.size() != nz)
        throw Error(Errc::ShapeMismatch, "row mask does not match volume depth");
    const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 1));
    if (kept == 0)
        throw Error(Errc::AllRowsMasked, "every depth row is masked");

    SpatioTemporalMap map;
    map.values = Tensor({ny, nt}, "yt");
    map.frame_interval_s = frame_interval_s;
    map.pixel_pitch_m = pixel_pitch_m;
    std::vector<double> acc(nt);
    for (std::size_t y = 0; y < ny; ++y) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t z = 0; z < nz; ++z) {
            if (!keep[z])
                continue;
            const float* row = vol.values().data() + (y * nz + z) * nt;
            for (std::size_t t = 0; t < nt; ++t)
                acc[t] += row[t];
        }
        for (std::size_t t = 0; t < nt; ++t)
            map.values(y, t) = static_cast<float>(acc[t] / static_cast<double>(kept));
    }
    return map;
}

/// Full chain: unwrap, difference, crop to gelatin rows and kept frames,
/// eliminate low-quality rows, median filter, depth mean.
inline PreprocessResult preprocess(const RawMeasurement& raw, const PipelineConfig& cfg,
                                   const AcquisitionConfig& acq = {})
{
    const auto unwrapped = unwrap_volume(raw.phase);
    const Tensor diff = temporal_phase_difference(unwrapped);
    const Tensor gel = crop_frames(crop_above_surface(diff, raw.surface_index), cfg.frames_kept);
    const Tensor gel_intensity = crop_above_surface(raw.intensity, raw.surface_index);

    PreprocessResult out;
    out.row_mask = row_quality_mask(gel_intensity, cfg.threshold_quantile);
    out.volume = median_filter_3(eliminate_rows(gel, out.row_mask));
    const RowMask all(out.volume.extent(1), 1);
    out.map = axial_mean(out.volume, all, acq.frame_interval_s(), acq.pixel_pitch_m());
    return out;
}

} // namespace oce
