#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "oce/core/random.hpp"
#include "oce/nn/conv.hpp"
#include "oce/nn/layer.hpp"

namespace oce::nn {

template <typename T>
class Relu final : public Layer<T> {
public:
    Shape output_shape(const Shape& in) const override { return in; }

    Feature<T> forward(const Feature<T>& x) override
    {
        input_ = x;
        Feature<T> y = x;
        for (auto& v : y.data)
            v = v > T{} ? v : T{};
        return y;
    }

    Feature<T> backward(const Feature<T>& grad_out) override
    {
        Feature<T> gx = grad_out;
        for (std::size_t i = 0; i < gx.data.size(); ++i)
            if (!(input_.data[i] > T{}))
                gx.data[i] = T{};
        return gx;
    }

    nlohmann::json describe() const override { return {{"kind", "relu"}}; }

private:
    Feature<T> input_;
};

/// Non-overlapping average pooling with window 2 on the flagged axes;
/// a trailing odd element is dropped.
template <typename T>
class AvgPool final : public Layer<T> {
public:
    explicit AvgPool(std::array<bool, 3> axes) : axes_(axes) {}

    Shape output_shape(const Shape& in) const override
    {
        Shape out = in;
        for (std::size_t a = 0; a < 3; ++a)
            if (axes_[a]) {
                if (in.ext[a] < 2)
                    throw Error(Errc::ShapeMismatch, "pooling axis " + std::to_string(a) + " has extent below 2");
                out.ext[a] = in.ext[a] / 2;
            }
        return out;
    }

    Feature<T> forward(const Feature<T>& x) override
    {
        in_shape_ = x.shape;
        const Shape out = output_shape(x.shape);
        Feature<T> y(out);
        const T scale = T(1) / static_cast<T>(window());
        visit(out, [&](std::size_t oi, std::size_t ii) { y.data[oi] += x.data[ii] * scale; });
        return y;
    }

    Feature<T> backward(const Feature<T>& grad_out) override
    {
        Feature<T> gx(in_shape_);
        const T scale = T(1) / static_cast<T>(window());
        visit(grad_out.shape, [&](std::size_t oi, std::size_t ii) { gx.data[ii] += grad_out.data[oi] * scale; });
        return gx;
    }

    nlohmann::json describe() const override { return {{"kind", "avg_pool"}, {"axes", axes_}}; }

private:
    std::size_t window() const
    {
        std::size_t w = 1;
        for (bool a : axes_)
            w *= a ? 2 : 1;
        return w;
    }

    template <typename F>
    void visit(const Shape& out, F&& f) const
    {
        const auto& L = in_shape_.ext;
        const std::array<std::size_t, 3> w{axes_[0] ? 2u : 1u, axes_[1] ? 2u : 1u, axes_[2] ? 2u : 1u};
        for (std::size_t c = 0; c < out.channels; ++c)
            for (std::size_t o0 = 0; o0 < out.ext[0]; ++o0)
                for (std::size_t o1 = 0; o1 < out.ext[1]; ++o1)
                    for (std::size_t o2 = 0; o2 < out.ext[2]; ++o2) {
                        const std::size_t oi = ((c * out.ext[0] + o0) * out.ext[1] + o1) * out.ext[2] + o2;
                        for (std::size_t a0 = 0; a0 < w[0]; ++a0)
                            for (std::size_t a1 = 0; a1 < w[1]; ++a1)
                                for (std::size_t a2 = 0; a2 < w[2]; ++a2) {
                                    const std::size_t ii = ((c * L[0] + o0 * w[0] + a0) * L[1] + o1 * w[1] + a1) * L[2] +
                                                           o2 * w[2] + a2;
                                    f(oi, ii);
                                }
                    }
    }

    std::array<bool, 3> axes_;
    Shape in_shape_{};
};

template <typename T>
class GlobalAvgPool final : public Layer<T> {
public:
    Shape output_shape(const Shape& in) const override { return Shape{in.channels, {1, 1, 1}}; }

    Feature<T> forward(const Feature<T>& x) override
    {
        in_shape_ = x.shape;
        Feature<T> y(output_shape(x.shape));
        const std::size_t n = x.shape.positions();
        for (std::size_t c = 0; c < x.shape.channels; ++c) {
            const T* src = x.channel(c);
            T acc{};
            for (std::size_t i = 0; i < n; ++i)
                acc += src[i];
            y.data[c] = acc / static_cast<T>(n);
        }
        return y;
    }

    Feature<T> backward(const Feature<T>& grad_out) override
    {
        Feature<T> gx(in_shape_);
        const std::size_t n = in_shape_.positions();
        for (std::size_t c = 0; c < in_shape_.channels; ++c)
            std::fill_n(gx.channel(c), n, grad_out.data[c] / static_cast<T>(n));
        return gx;
    }

    nlohmann::json describe() const override { return {{"kind", "global_avg_pool"}}; }

private:
    Shape in_shape_{};
};

/// Affine map from the flattened input to `out` features.
template <typename T>
class FullyConnected final : public Layer<T> {
public:
    FullyConnected(std::size_t in, std::size_t out, std::string name = "fc")
        : in_(in), out_(out), weight_(name + ".weight", {out, in}), bias_(name + ".bias", {out})
    {
    }

    void init(Rng& rng)
    {
        he_uniform(weight_.value, in_, rng);
        std::fill(bias_.value.begin(), bias_.value.end(), T{});
    }

    Param<T>& weight() { return weight_; }
    Param<T>& bias() { return bias_; }

    Shape output_shape(const Shape& in) const override
    {
        if (in.size() != in_)
            throw Error(Errc::ShapeMismatch, "fully connected layer expects " + std::to_string(in_) + " inputs, got " +
                                                 std::to_string(in.size()));
        return Shape{out_, {1, 1, 1}};
    }

    Feature<T> forward(const Feature<T>& x) override
    {
        input_ = x;
        Feature<T> y(output_shape(x.shape));
        for (std::size_t o = 0; o < out_; ++o) {
            const T* w = weight_.value.data() + o * in_;
            T acc = bias_.value[o];
            for (std::size_t i = 0; i < in_; ++i)
                acc += w[i] * x.data[i];
            y.data[o] = acc;
        }
        return y;
    }

    Feature<T> backward(const Feature<T>& grad_out) override
    {
        Feature<T> gx(input_.shape);
        for (std::size_t o = 0; o < out_; ++o) {
            const T g = grad_out.data[o];
            const T* w = weight_.value.data() + o * in_;
            T* gw = weight_.grad.data() + o * in_;
            for (std::size_t i = 0; i < in_; ++i) {
                gw[i] += g * input_.data[i];
                gx.data[i] += g * w[i];
            }
            bias_.grad[o] += g;
        }
        return gx;
    }

    void collect_params(std::vector<Param<T>*>& out) override
    {
        out.push_back(&weight_);
        out.push_back(&bias_);
    }

    nlohmann::json describe() const override
    {
        return {{"kind", "fully_connected"}, {"in", in_}, {"out", out_}};
    }

private:
    std::size_t in_, out_;
    Param<T> weight_;
    Param<T> bias_;
    Feature<T> input_;
};

} // namespace oce::nn
