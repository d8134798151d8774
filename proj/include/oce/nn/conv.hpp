#pragma once

// Spatio-temporal cross-correlation over up to three positional axes.
// Padding is floor(k/2) on every axis, which is "same" padding for odd
// kernels at unit stride; output extent is floor((L + 2p - k) / s) + 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "oce/core/random.hpp"
#include "oce/nn/layer.hpp"

namespace oce::nn {

struct ConvGeometry {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::array<std::size_t, 3> kernel{1, 1, 1};
    std::array<std::size_t, 3> stride{1, 1, 1};

    std::size_t pad(std::size_t axis) const { return kernel[axis] / 2; }
    std::size_t taps() const { return kernel[0] * kernel[1] * kernel[2]; }

    Shape output_shape(const Shape& in) const
    {
        if (in.channels != in_channels)
            throw Error(Errc::ShapeMismatch, "conv expects " + std::to_string(in_channels) + " channels, got " +
                                                 std::to_string(in.channels));
        Shape out;
        out.channels = out_channels;
        for (std::size_t a = 0; a < 3; ++a) {
            const std::size_t padded = in.ext[a] + 2 * pad(a);
            if (kernel[a] == 0 || stride[a] == 0 || padded < kernel[a])
                throw Error(Errc::ShapeMismatch, "kernel does not fit padded input on axis " + std::to_string(a));
            out.ext[a] = (padded - kernel[a]) / stride[a] + 1;
        }
        return out;
    }
};

namespace detail {

/// Output index range [lo, hi) along one axis whose input index
/// o * s + k - p lies inside [0, len).
inline void valid_range(std::size_t out_len, std::size_t in_len, std::size_t s, std::size_t k, std::size_t p,
                        std::size_t& lo, std::size_t& hi)
{
    const auto off = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(p);
    const auto stride = static_cast<std::ptrdiff_t>(s);
    // smallest o with o*s + off >= 0
    std::ptrdiff_t first = off >= 0 ? 0 : (-off + stride - 1) / stride;
    // largest o with o*s + off <= in_len - 1
    const std::ptrdiff_t last_num = static_cast<std::ptrdiff_t>(in_len) - 1 - off;
    std::ptrdiff_t end = last_num < 0 ? 0 : last_num / stride + 1;
    end = std::min<std::ptrdiff_t>(end, static_cast<std::ptrdiff_t>(out_len));
    first = std::min(first, end);
    lo = static_cast<std::size_t>(first);
    hi = static_cast<std::size_t>(end);
}

} // namespace detail

/// Reference loop nest valid for any geometry; see conv_forward.
template <typename T>
void conv_forward_direct(const T* x, const Shape& in, const T* w, const T* b, const ConvGeometry& g, T* y)
{
    const Shape out = g.output_shape(in);
    const std::size_t in_pos = in.positions();
    const std::size_t out_pos = out.positions();
    const std::size_t taps = g.taps();
    const std::size_t L0 = in.ext[0], L1 = in.ext[1], L2 = in.ext[2];
    const std::size_t O0 = out.ext[0], O1 = out.ext[1], O2 = out.ext[2];
    const std::size_t s2 = g.stride[2];

    std::array<std::size_t, 16> lo2{}, hi2{};
    for (std::size_t k2 = 0; k2 < g.kernel[2] && k2 < 16; ++k2)
        detail::valid_range(O2, L2, s2, k2, g.pad(2), lo2[k2], hi2[k2]);
    if (g.kernel[2] > 16)
        throw Error(Errc::InvalidSpec, "temporal kernel larger than 16 taps");

    for (std::size_t co = 0; co < g.out_channels; ++co) {
        T* yc = y + co * out_pos;
        const T* wc = w + co * g.in_channels * taps;
        for (std::size_t o0 = 0; o0 < O0; ++o0) {
            for (std::size_t o1 = 0; o1 < O1; ++o1) {
                T* row = yc + (o0 * O1 + o1) * O2;
                std::fill_n(row, O2, b ? b[co] : T{});
                for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
                    const T* xc = x + ci * in_pos;
                    const T* wk = wc + ci * taps;
                    for (std::size_t k0 = 0; k0 < g.kernel[0]; ++k0) {
                        const auto i0 = static_cast<std::ptrdiff_t>(o0 * g.stride[0] + k0) -
                                        static_cast<std::ptrdiff_t>(g.pad(0));
                        if (i0 < 0 || i0 >= static_cast<std::ptrdiff_t>(L0))
                            continue;
                        for (std::size_t k1 = 0; k1 < g.kernel[1]; ++k1) {
                            const auto i1 = static_cast<std::ptrdiff_t>(o1 * g.stride[1] + k1) -
                                            static_cast<std::ptrdiff_t>(g.pad(1));
                            if (i1 < 0 || i1 >= static_cast<std::ptrdiff_t>(L1))
                                continue;
                            const T* xrow = xc + (static_cast<std::size_t>(i0) * L1 + static_cast<std::size_t>(i1)) * L2;
                            const T* wrow = wk + (k0 * g.kernel[1] + k1) * g.kernel[2];
                            for (std::size_t k2 = 0; k2 < g.kernel[2]; ++k2) {
                                const T wv = wrow[k2];
                                const std::ptrdiff_t shift =
                                    static_cast<std::ptrdiff_t>(k2) - static_cast<std::ptrdiff_t>(g.pad(2));
                                if (s2 == 1) {
                                    const T* src = xrow + shift;
#pragma omp simd
                                    for (std::size_t o2 = lo2[k2]; o2 < hi2[k2]; ++o2)
                                        row[o2] += wv * src[o2];
                                } else {
                                    for (std::size_t o2 = lo2[k2]; o2 < hi2[k2]; ++o2)
                                        row[o2] += wv * xrow[static_cast<std::ptrdiff_t>(o2 * s2) + shift];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Reference loop nest valid for any geometry; see conv_backward.
template <typename T>
void conv_backward_direct(const T* x, const Shape& in, const T* w, const T* gy, const ConvGeometry& g, T* gx, T* gw, T* gb)
{
    const Shape out = g.output_shape(in);
    const std::size_t in_pos = in.positions();
    const std::size_t out_pos = out.positions();
    const std::size_t taps = g.taps();
    const std::size_t L0 = in.ext[0], L1 = in.ext[1], L2 = in.ext[2];
    const std::size_t O0 = out.ext[0], O1 = out.ext[1], O2 = out.ext[2];
    const std::size_t s2 = g.stride[2];

    std::array<std::size_t, 16> lo2{}, hi2{};
    for (std::size_t k2 = 0; k2 < g.kernel[2]; ++k2)
        detail::valid_range(O2, L2, s2, k2, g.pad(2), lo2[k2], hi2[k2]);

    for (std::size_t co = 0; co < g.out_channels; ++co) {
        const T* gyc = gy + co * out_pos;
        const T* wc = w + co * g.in_channels * taps;
        T* gwc = gw + co * g.in_channels * taps;
        if (gb) {
            T acc{};
#pragma omp simd reduction(+ : acc)
            for (std::size_t i = 0; i < out_pos; ++i)
                acc += gyc[i];
            gb[co] += acc;
        }
        for (std::size_t o0 = 0; o0 < O0; ++o0) {
            for (std::size_t o1 = 0; o1 < O1; ++o1) {
                const T* grow = gyc + (o0 * O1 + o1) * O2;
                for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
                    const T* xc = x + ci * in_pos;
                    T* gxc = gx ? gx + ci * in_pos : nullptr;
                    const T* wk = wc + ci * taps;
                    T* gwk = gwc + ci * taps;
                    for (std::size_t k0 = 0; k0 < g.kernel[0]; ++k0) {
                        const auto i0 = static_cast<std::ptrdiff_t>(o0 * g.stride[0] + k0) -
                                        static_cast<std::ptrdiff_t>(g.pad(0));
                        if (i0 < 0 || i0 >= static_cast<std::ptrdiff_t>(L0))
                            continue;
                        for (std::size_t k1 = 0; k1 < g.kernel[1]; ++k1) {
                            const auto i1 = static_cast<std::ptrdiff_t>(o1 * g.stride[1] + k1) -
                                            static_cast<std::ptrdiff_t>(g.pad(1));
                            if (i1 < 0 || i1 >= static_cast<std::ptrdiff_t>(L1))
                                continue;
                            const std::size_t row_off =
                                (static_cast<std::size_t>(i0) * L1 + static_cast<std::size_t>(i1)) * L2;
                            const T* xrow = xc + row_off;
                            T* gxrow = gxc ? gxc + row_off : nullptr;
                            const std::size_t kbase = (k0 * g.kernel[1] + k1) * g.kernel[2];
                            for (std::size_t k2 = 0; k2 < g.kernel[2]; ++k2) {
                                const std::ptrdiff_t shift =
                                    static_cast<std::ptrdiff_t>(k2) - static_cast<std::ptrdiff_t>(g.pad(2));
                                const T wv = wk[kbase + k2];
                                T acc{};
                                if (s2 == 1) {
                                    const T* src = xrow + shift;
#pragma omp simd reduction(+ : acc)
                                    for (std::size_t o2 = lo2[k2]; o2 < hi2[k2]; ++o2)
                                        acc += grow[o2] * src[o2];
                                    if (gxrow) {
                                        T* dst = gxrow + shift;
#pragma omp simd
                                        for (std::size_t o2 = lo2[k2]; o2 < hi2[k2]; ++o2)
                                            dst[o2] += wv * grow[o2];
                                    }
                                } else {
                                    for (std::size_t o2 = lo2[k2]; o2 < hi2[k2]; ++o2) {
                                        const auto idx = static_cast<std::ptrdiff_t>(o2 * s2) + shift;
                                        acc += grow[o2] * xrow[idx];
                                        if (gxrow)
                                            gxrow[idx] += wv * grow[o2];
                                    }
                                }
                                gwk[kbase + k2] += acc;
                            }
                        }
                    }
                }
            }
        }
    }
}

namespace detail {

/// Unit-stride, odd-kernel convolution evaluated on a zero-padded copy of
/// the input flattened in row-major order. For a tap k the input sample
/// sits at a constant flat offset from the output position, so every tap
/// becomes a shifted vector multiply-add over one long contiguous range.
/// Output positions whose padded-grid row would wrap are computed and
/// then discarded.
template <typename T>
struct PaddedGrid {
    std::array<std::size_t, 3> ext{}, pad{}, padded{};
    std::size_t s0 = 0, s1 = 0; // padded flat strides
    std::size_t span = 0;       // flat range covering every valid output
    std::size_t stored = 0;     // per-channel buffer length incl. slack

    static constexpr std::size_t lanes = 16;

    PaddedGrid(const std::array<std::size_t, 3>& e, const std::array<std::size_t, 3>& k)
    {
        ext = e;
        for (std::size_t a = 0; a < 3; ++a) {
            pad[a] = k[a] / 2;
            padded[a] = e[a] + 2 * pad[a];
        }
        s1 = padded[2];
        s0 = padded[1] * padded[2];
        span = ((ext[0] * s0 + lanes - 1) / lanes) * lanes;
        stored = std::max(padded[0] * s0, span + (2 * pad[0]) * s0 + (2 * pad[1]) * s1 + 2 * pad[2]) + lanes;
    }

    std::size_t out_index(std::size_t o0, std::size_t o1, std::size_t o2) const { return o0 * s0 + o1 * s1 + o2; }

    /// Copies `channels` dense channels into padded buffers.
    void pad_in(const T* src, std::size_t channels, std::vector<T>& dst) const
    {
        dst.assign(channels * stored, T{});
        const std::size_t pos = ext[0] * ext[1] * ext[2];
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t i0 = 0; i0 < ext[0]; ++i0)
                for (std::size_t i1 = 0; i1 < ext[1]; ++i1)
                    std::copy_n(src + c * pos + (i0 * ext[1] + i1) * ext[2], ext[2],
                                dst.data() + c * stored + (i0 + pad[0]) * s0 + (i1 + pad[1]) * s1 + pad[2]);
    }

    /// Lays dense channels out on the output grid (no halo offset), zero elsewhere.
    void place_out(const T* src, std::size_t channels, std::vector<T>& dst) const
    {
        dst.assign(channels * stored, T{});
        const std::size_t pos = ext[0] * ext[1] * ext[2];
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t i0 = 0; i0 < ext[0]; ++i0)
                for (std::size_t i1 = 0; i1 < ext[1]; ++i1)
                    std::copy_n(src + c * pos + (i0 * ext[1] + i1) * ext[2], ext[2],
                                dst.data() + c * stored + out_index(i0, i1, 0));
    }

    /// Adds the valid output positions of a flat buffer into dense channels.
    void gather_add(const T* flat, std::size_t channels, T* dst) const
    {
        const std::size_t pos = ext[0] * ext[1] * ext[2];
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t i0 = 0; i0 < ext[0]; ++i0)
                for (std::size_t i1 = 0; i1 < ext[1]; ++i1) {
                    const T* s = flat + c * stored + out_index(i0, i1, 0);
                    T* d = dst + c * pos + (i0 * ext[1] + i1) * ext[2];
                    for (std::size_t i2 = 0; i2 < ext[2]; ++i2)
                        d[i2] += s[i2];
                }
    }

    std::vector<std::size_t> tap_offsets(const std::array<std::size_t, 3>& k) const
    {
        std::vector<std::size_t> off;
        for (std::size_t k0 = 0; k0 < k[0]; ++k0)
            for (std::size_t k1 = 0; k1 < k[1]; ++k1)
                for (std::size_t k2 = 0; k2 < k[2]; ++k2)
                    off.push_back(k0 * s0 + k1 * s1 + k2);
        return off;
    }
};

/// out[co][f] = sum_ci sum_t wpack[(ci * taps + t) * n_out + co] * xpad[ci][f + off[t]]
/// for CB output channels starting at co0.
template <typename T, std::size_t CB>
void padded_conv_block(const T* xpad, std::size_t n_in, std::size_t stored, const std::vector<std::size_t>& off,
                       const T* wpack, std::size_t n_out, std::size_t co0, std::size_t span, T* out)
{
    constexpr std::size_t L = PaddedGrid<T>::lanes;
    const std::size_t taps = off.size();
    for (std::size_t f = 0; f < span; f += L) {
        T acc[CB][L] = {};
        for (std::size_t ci = 0; ci < n_in; ++ci) {
            const T* xc = xpad + ci * stored + f;
            const T* wc = wpack + ci * taps * n_out + co0;
            for (std::size_t t = 0; t < taps; ++t) {
                const T* xv = xc + off[t];
                const T* wv = wc + t * n_out;
                for (std::size_t cb = 0; cb < CB; ++cb) {
                    const T w = wv[cb];
#pragma omp simd
                    for (std::size_t l = 0; l < L; ++l)
                        acc[cb][l] += w * xv[l];
                }
            }
        }
        for (std::size_t cb = 0; cb < CB; ++cb)
            std::copy_n(acc[cb], L, out + (co0 + cb) * stored + f);
    }
}

template <typename T>
void padded_conv(const T* xpad, std::size_t n_in, std::size_t stored, const std::vector<std::size_t>& off,
                 const T* wpack, std::size_t n_out, std::size_t span, T* out)
{
    constexpr std::size_t CB = 8;
    std::size_t co = 0;
    for (; co + CB <= n_out; co += CB)
        padded_conv_block<T, CB>(xpad, n_in, stored, off, wpack, n_out, co, span, out);
    switch (n_out - co) {
    case 7: padded_conv_block<T, 7>(xpad, n_in, stored, off, wpack, n_out, co, span, out); break;
    case 6: padded_conv_block<T, 6>(xpad, n_in, stored, off, wpack, n_out, co, span, out); break;
    case 5: padded_conv_block<T, 5>(xpad, n_in, stored, off, wpack, n_out, co, span, out); break;
    case 4: padded_conv_block<T, 4>(xpad, n_in, stored, off, wpack, n_out, co, span, out); break;
    case 3: padded_conv_block<T, 3>(xpad, n_in, stored, off, wpack, n_out, co, span, out); break;
    case 2: padded_conv_block<T, 2>(xpad, n_in, stored, off, wpack, n_out, co, span, out); break;
    case 1: padded_conv_block<T, 1>(xpad, n_in, stored, off, wpack, n_out, co, span, out); break;
    default: break;
    }
}

inline bool same_conv_applies(const ConvGeometry& g)
{
    for (std::size_t a = 0; a < 3; ++a)
        if (g.stride[a] != 1 || g.kernel[a] % 2 == 0)
            return false;
    return true;
}

template <typename T>
void same_conv_forward(const T* x, const Shape& in, const T* w, const T* b, const ConvGeometry& g, T* y)
{
    const PaddedGrid<T> grid(in.ext, g.kernel);
    const auto off = grid.tap_offsets(g.kernel);
    const std::size_t taps = off.size();
    std::vector<T> xpad, wpack(g.in_channels * taps * g.out_channels), out(g.out_channels * grid.stored);
    grid.pad_in(x, g.in_channels, xpad);
    for (std::size_t co = 0; co < g.out_channels; ++co)
        for (std::size_t ci = 0; ci < g.in_channels; ++ci)
            for (std::size_t t = 0; t < taps; ++t)
                wpack[(ci * taps + t) * g.out_channels + co] = w[(co * g.in_channels + ci) * taps + t];
    padded_conv(xpad.data(), g.in_channels, grid.stored, off, wpack.data(), g.out_channels, grid.span, out.data());
    const std::size_t pos = in.positions();
    for (std::size_t co = 0; co < g.out_channels; ++co)
        std::fill_n(y + co * pos, pos, b ? b[co] : T{});
    grid.gather_add(out.data(), g.out_channels, y);
}

/// dst[t] += sum_f g[f] * x[f + off[t]] with one vector accumulator per tap.
template <typename T, std::size_t TAPS>
void weight_grad_taps(const T* g, const T* x, const std::vector<std::size_t>& off, std::size_t span, T* dst)
{
    constexpr std::size_t L = PaddedGrid<T>::lanes;
    std::array<std::size_t, TAPS> o{};
    std::copy_n(off.begin(), TAPS, o.begin());
    T acc[TAPS][L] = {};
    for (std::size_t f = 0; f < span; f += L) {
        const T* gf = g + f;
        for (std::size_t t = 0; t < TAPS; ++t) {
            const T* xf = x + f + o[t];
#pragma omp simd
            for (std::size_t l = 0; l < L; ++l)
                acc[t][l] += gf[l] * xf[l];
        }
    }
    for (std::size_t t = 0; t < TAPS; ++t) {
        T sum{};
        for (std::size_t l = 0; l < L; ++l)
            sum += acc[t][l];
        dst[t] += sum;
    }
}

template <typename T>
void weight_grad_generic(const T* g, const T* x, const std::vector<std::size_t>& off, std::size_t span, T* dst)
{
    constexpr std::size_t L = PaddedGrid<T>::lanes;
    for (std::size_t t = 0; t < off.size(); ++t) {
        T acc[L] = {};
        for (std::size_t f = 0; f < span; f += L)
#pragma omp simd
            for (std::size_t l = 0; l < L; ++l)
                acc[l] += g[f + l] * x[f + off[t] + l];
        T sum{};
        for (std::size_t l = 0; l < L; ++l)
            sum += acc[l];
        dst[t] += sum;
    }
}

template <typename T>
void same_conv_backward(const T* x, const Shape& in, const T* w, const T* gy, const ConvGeometry& g, T* gx, T* gw,
                        T* gb)
{
    const PaddedGrid<T> grid(in.ext, g.kernel);
    const auto off = grid.tap_offsets(g.kernel);
    const std::size_t taps = off.size();
    const std::size_t pos = in.positions();

    if (gb)
        for (std::size_t co = 0; co < g.out_channels; ++co) {
            T acc{};
            const T* src = gy + co * pos;
#pragma omp simd reduction(+ : acc)
            for (std::size_t i = 0; i < pos; ++i)
                acc += src[i];
            gb[co] += acc;
        }

    // input gradient: same-padded correlation of gy with the flipped,
    // channel-transposed kernel
    if (gx) {
        std::vector<T> gypad, wpack(g.out_channels * taps * g.in_channels), out(g.in_channels * grid.stored);
        grid.pad_in(gy, g.out_channels, gypad);
        for (std::size_t co = 0; co < g.out_channels; ++co)
            for (std::size_t ci = 0; ci < g.in_channels; ++ci)
                for (std::size_t t = 0; t < taps; ++t)
                    wpack[(co * taps + (taps - 1 - t)) * g.in_channels + ci] = w[(co * g.in_channels + ci) * taps + t];
        padded_conv(gypad.data(), g.out_channels, grid.stored, off, wpack.data(), g.in_channels, grid.span,
                    out.data());
        grid.gather_add(out.data(), g.in_channels, gx);
    }

    // weight gradient: gw[co][ci][t] = sum_f gy_flat[co][f] * xpad[ci][f + off[t]]
    std::vector<T> xpad, gyflat;
    grid.pad_in(x, g.in_channels, xpad);
    grid.place_out(gy, g.out_channels, gyflat);
    for (std::size_t co = 0; co < g.out_channels; ++co)
        for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
            const T* gv = gyflat.data() + co * grid.stored;
            const T* xv = xpad.data() + ci * grid.stored;
            T* dst = gw + (co * g.in_channels + ci) * taps;
            switch (taps) {
            case 27: weight_grad_taps<T, 27>(gv, xv, off, grid.span, dst); break;
            case 9: weight_grad_taps<T, 9>(gv, xv, off, grid.span, dst); break;
            default: weight_grad_generic(gv, xv, off, grid.span, dst); break;
            }
        }
}

} // namespace detail

/// y[co] = b[co] + sum_ci w[co][ci] (*) x[ci], reading the first
/// g.in_channels channels of `x`.
template <typename T>
void conv_forward(const T* x, const Shape& in, const T* w, const T* b, const ConvGeometry& g, T* y)
{
    if (detail::same_conv_applies(g)) {
        g.output_shape(in);
        detail::same_conv_forward(x, in, w, b, g, y);
    } else {
        conv_forward_direct(x, in, w, b, g, y);
    }
}

/// Accumulates gradients: gx (optional) w.r.t. the first g.in_channels
/// channels of x, gw, gb (optional).
template <typename T>
void conv_backward(const T* x, const Shape& in, const T* w, const T* gy, const ConvGeometry& g, T* gx, T* gw, T* gb)
{
    if (detail::same_conv_applies(g)) {
        g.output_shape(in);
        detail::same_conv_backward(x, in, w, gy, g, gx, gw, gb);
    } else {
        conv_backward_direct(x, in, w, gy, g, gx, gw, gb);
    }
}

/// He-uniform initialization: U(-sqrt(6 / fan_in), sqrt(6 / fan_in)).
template <typename T>
void he_uniform(std::vector<T>& w, std::size_t fan_in, Rng& rng)
{
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : w)
        v = static_cast<T>(rng.uniform(-limit, limit));
}

template <typename T>
class ConvSt final : public Layer<T> {
public:
    explicit ConvSt(const ConvGeometry& g, std::string name = "conv")
        : geom_(g),
          weight_(name + ".weight", {g.out_channels, g.in_channels, g.kernel[0], g.kernel[1], g.kernel[2]}),
          bias_(name + ".bias", {g.out_channels})
    {
    }

    const ConvGeometry& geometry() const { return geom_; }
    Param<T>& weight() { return weight_; }
    Param<T>& bias() { return bias_; }

    void init(Rng& rng)
    {
        he_uniform(weight_.value, geom_.in_channels * geom_.taps(), rng);
        std::fill(bias_.value.begin(), bias_.value.end(), T{});
    }

    Shape output_shape(const Shape& in) const override { return geom_.output_shape(in); }

    Feature<T> forward(const Feature<T>& x) override
    {
        input_ = x;
        Feature<T> y(output_shape(x.shape));
        conv_forward(x.data.data(), x.shape, weight_.value.data(), bias_.value.data(), geom_, y.data.data());
        return y;
    }

    Feature<T> backward(const Feature<T>& grad_out) override
    {
        Feature<T> gx(input_.shape);
        conv_backward(input_.data.data(), input_.shape, weight_.value.data(), grad_out.data.data(), geom_,
                      gx.data.data(), weight_.grad.data(), bias_.grad.data());
        return gx;
    }

    void collect_params(std::vector<Param<T>*>& out) override
    {
        out.push_back(&weight_);
        out.push_back(&bias_);
    }

    nlohmann::json describe() const override
    {
        return {{"kind", "conv_st"},
                {"in_channels", geom_.in_channels},
                {"out_channels", geom_.out_channels},
                {"kernel", geom_.kernel},
                {"stride", geom_.stride}};
    }

private:
    ConvGeometry geom_;
    Param<T> weight_;
    Param<T> bias_;
    Feature<T> input_;
};

} // namespace oce::nn
