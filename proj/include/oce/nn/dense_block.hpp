#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "oce/core/random.hpp"
#include "oce/nn/conv.hpp"
#include "oce/nn/layer.hpp"

namespace oce::nn {

/// Densely connected block: composite layer l computes conv(relu(cat_l)),
/// where cat_l is the block input followed by the outputs of layers < l.
/// The output is the block input followed by all layer outputs.
template <typename T>
class DenseBlock final : public Layer<T> {
public:
    DenseBlock(std::size_t in_channels, std::size_t layers, std::size_t growth, std::array<std::size_t, 3> kernel,
               const std::string& name = "dense")
        : in_channels_(in_channels), growth_(growth)
    {
        if (layers == 0 || growth == 0)
            throw Error(Errc::InvalidSpec, "dense block needs at least one layer and positive growth");
        for (std::size_t l = 0; l < layers; ++l) {
            ConvGeometry g;
            g.in_channels = in_channels + l * growth;
            g.out_channels = growth;
            g.kernel = kernel;
            g.stride = {1, 1, 1};
            convs_.emplace_back(g, name + ".layer" + std::to_string(l));
        }
    }

    std::size_t layers() const { return convs_.size(); }
    std::size_t out_channels() const { return in_channels_ + layers() * growth_; }
    ConvSt<T>& conv(std::size_t l) { return convs_[l]; }

    void init(Rng& rng)
    {
        for (auto& c : convs_)
            c.init(rng);
    }

    Shape output_shape(const Shape& in) const override
    {
        if (in.channels != in_channels_)
            throw Error(Errc::ShapeMismatch, "dense block expects " + std::to_string(in_channels_) + " channels, got " +
                                                 std::to_string(in.channels));
        for (const auto& c : convs_)
            if (c.geometry().output_shape(Shape{c.geometry().in_channels, in.ext}).ext != in.ext)
                throw Error(Errc::ShapeMismatch, "dense block layer changes extents");
        return Shape{out_channels(), in.ext};
    }

    Feature<T> forward(const Feature<T>& x) override
    {
        const Shape out_shape = output_shape(x.shape);
        const std::size_t pos = x.shape.positions();
        Feature<T> cat(out_shape);
        std::copy(x.data.begin(), x.data.end(), cat.data.begin());
        activated_.assign(cat.data.size(), T{});
        relu_into(cat.data.data(), activated_.data(), x.data.size());
        for (std::size_t l = 0; l < convs_.size(); ++l) {
            const auto& g = convs_[l].geometry();
            const std::size_t c_in = g.in_channels;
            T* dst = cat.data.data() + c_in * pos;
            conv_forward(activated_.data(), Shape{c_in, x.shape.ext}, convs_[l].weight().value.data(),
                         convs_[l].bias().value.data(), g, dst);
            relu_into(dst, activated_.data() + c_in * pos, growth_ * pos);
        }
        cat_ = cat.data;
        ext_ = x.shape.ext;
        return cat;
    }

    Feature<T> backward(const Feature<T>& grad_out) override
    {
        const std::size_t pos = ext_[0] * ext_[1] * ext_[2];
        std::vector<T> grad = grad_out.data; // gradient w.r.t. the concatenation
        std::vector<T> grad_act;
        for (std::size_t l = convs_.size(); l-- > 0;) {
            const auto& g = convs_[l].geometry();
            const std::size_t c_in = g.in_channels;
            grad_act.assign(c_in * pos, T{});
            conv_backward(activated_.data(), Shape{c_in, ext_}, convs_[l].weight().value.data(),
                          grad.data() + c_in * pos, g, grad_act.data(), convs_[l].weight().grad.data(),
                          convs_[l].bias().grad.data());
            for (std::size_t i = 0; i < c_in * pos; ++i)
                if (cat_[i] > T{})
                    grad[i] += grad_act[i];
        }
        grad.resize(in_channels_ * pos);
        return Feature<T>(Shape{in_channels_, ext_}, std::move(grad));
    }

    void collect_params(std::vector<Param<T>*>& out) override
    {
        for (auto& c : convs_)
            c.collect_params(out);
    }

    nlohmann::json describe() const override
    {
        return {{"kind", "dense_block"},
                {"in_channels", in_channels_},
                {"layers", convs_.size()},
                {"growth", growth_},
                {"kernel", convs_.front().geometry().kernel}};
    }

private:
    static void relu_into(const T* src, T* dst, std::size_t n)
    {
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = src[i] > T{} ? src[i] : T{};
    }

    std::size_t in_channels_;
    std::size_t growth_;
    std::vector<ConvSt<T>> convs_;
    std::vector<T> cat_;
    std::vector<T> activated_;
    std::array<std::size_t, 3> ext_{1, 1, 1};
};

} // namespace oce::nn
