#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oce/core/json_util.hpp"
#include "oce/core/random.hpp"
#include "oce/nn/conv.hpp"
#include "oce/nn/dense_block.hpp"
#include "oce/nn/layers.hpp"

namespace oce::nn {

/// Spatio-temporal DenseNet regressor. Positional axes are {e0, e1, t}:
/// a 1D+t input has e0 = 1 and e1 = lateral; a 2D+t input has e0 = lateral
/// and e1 = depth.
struct CnnArch {
    int spatial_dims = 2; ///< 1 or 2
    std::size_t k0 = 16;
    std::size_t blocks = 4;
    std::size_t layers_per_block = 4;
    std::size_t growth = 5;
    std::size_t stem_temporal_kernel = 5;
    std::size_t stem_spatial_kernel = 3;
    std::size_t stem_temporal_stride = 4;
    std::size_t block_kernel = 3;

    void validate() const
    {
        if (spatial_dims != 1 && spatial_dims != 2)
            throw Error(Errc::InvalidSpec, "spatial_dims must be 1 or 2");
        if (k0 == 0 || blocks == 0 || layers_per_block == 0 || growth == 0 || stem_temporal_kernel == 0 ||
            stem_spatial_kernel == 0 || stem_temporal_stride == 0 || block_kernel == 0)
            throw Error(Errc::InvalidSpec, "CNN extents, strides and channel counts must be positive");
        if (stem_temporal_kernel > 16 || block_kernel > 16)
            throw Error(Errc::InvalidSpec, "temporal kernel larger than 16 taps");
    }

    std::size_t head_channels() const { return k0 + blocks * layers_per_block * growth; }
};

inline void to_json(nlohmann::json& j, const CnnArch& a)
{
    j = {{"spatial_dims", a.spatial_dims},
         {"k0", a.k0},
         {"blocks", a.blocks},
         {"layers_per_block", a.layers_per_block},
         {"growth", a.growth},
         {"stem_temporal_kernel", a.stem_temporal_kernel},
         {"stem_spatial_kernel", a.stem_spatial_kernel},
         {"stem_temporal_stride", a.stem_temporal_stride},
         {"block_kernel", a.block_kernel}};
}

inline void from_json(const nlohmann::json& j, CnnArch& a)
{
    json_util::reject_unknown(j,
                              {"spatial_dims", "k0", "blocks", "layers_per_block", "growth", "stem_temporal_kernel",
                               "stem_spatial_kernel", "stem_temporal_stride", "block_kernel"},
                              "cnn");
    using json_util::read_opt;
    read_opt(j, "spatial_dims", a.spatial_dims);
    read_opt(j, "k0", a.k0);
    read_opt(j, "blocks", a.blocks);
    read_opt(j, "layers_per_block", a.layers_per_block);
    read_opt(j, "growth", a.growth);
    read_opt(j, "stem_temporal_kernel", a.stem_temporal_kernel);
    read_opt(j, "stem_spatial_kernel", a.stem_spatial_kernel);
    read_opt(j, "stem_temporal_stride", a.stem_temporal_stride);
    read_opt(j, "block_kernel", a.block_kernel);
}

/// Sequential model with a single scalar output.
template <typename T>
class Network {
public:
    Network() = default;
    Network(nlohmann::json architecture, std::vector<std::unique_ptr<Layer<T>>> layers)
        : arch_(std::move(architecture)), layers_(std::move(layers))
    {
        for (auto& l : layers_)
            l->collect_params(params_);
    }

    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    const nlohmann::json& architecture() const { return arch_; }
    std::size_t layer_count() const { return layers_.size(); }
    Layer<T>& layer(std::size_t i) { return *layers_[i]; }
    const std::vector<Param<T>*>& params() const { return params_; }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (auto* p : params_)
            n += p->size();
        return n;
    }

    /// Output shape after each layer, starting with the input itself.
    std::vector<Shape> propagate(const Shape& input) const
    {
        std::vector<Shape> shapes{input};
        for (const auto& l : layers_)
            shapes.push_back(l->output_shape(shapes.back()));
        return shapes;
    }

    Feature<T> forward_feature(const Feature<T>& x)
    {
        Feature<T> h = x;
        for (auto& l : layers_)
            h = l->forward(h);
        return h;
    }

    T forward(const Feature<T>& x)
    {
        const Feature<T> out = forward_feature(x);
        if (out.data.size() != 1)
            throw Error(Errc::ShapeMismatch, "network output is not a scalar");
        return out.data[0];
    }

    /// Backpropagates d(loss)/d(output) through the last forward pass and
    /// accumulates parameter gradients; returns the gradient w.r.t. the input.
    Feature<T> backward(T grad_output)
    {
        Feature<T> g(Shape{1, {1, 1, 1}}, std::vector<T>{grad_output});
        for (std::size_t i = layers_.size(); i-- > 0;)
            g = layers_[i]->backward(g);
        return g;
    }

    void zero_grad()
    {
        for (auto* p : params_)
            std::fill(p->grad.begin(), p->grad.end(), T{});
    }

    std::vector<T> flat_parameters() const
    {
        std::vector<T> flat;
        flat.reserve(parameter_count());
        for (auto* p : params_)
            flat.insert(flat.end(), p->value.begin(), p->value.end());
        return flat;
    }

    void set_flat_parameters(const std::vector<T>& flat)
    {
        if (flat.size() != parameter_count())
            throw Error(Errc::ShapeMismatch, "expected " + std::to_string(parameter_count()) + " parameters, got " +
                                                 std::to_string(flat.size()));
        std::size_t off = 0;
        for (auto* p : params_) {
            std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), p->size(), p->value.begin());
            off += p->size();
        }
    }

private:
    nlohmann::json arch_;
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    std::vector<Param<T>*> params_;
};

/// input(1) -> [FC + ReLU] per hidden width -> FC(1).
template <typename T>
Network<T> build_mlp(const std::vector<std::size_t>& hidden, std::uint64_t seed)
{
    if (hidden.empty())
        throw Error(Errc::InvalidSpec, "MLP needs at least one hidden layer");
    Rng rng(seed);
    std::vector<std::unique_ptr<Layer<T>>> layers;
    std::size_t width = 1;
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        if (hidden[i] == 0)
            throw Error(Errc::InvalidSpec, "hidden width must be positive");
        auto fc = std::make_unique<FullyConnected<T>>(width, hidden[i], "fc" + std::to_string(i));
        fc->init(rng);
        layers.push_back(std::move(fc));
        layers.push_back(std::make_unique<Relu<T>>());
        width = hidden[i];
    }
    auto head = std::make_unique<FullyConnected<T>>(width, 1, "head");
    head->init(rng);
    layers.push_back(std::move(head));
    return Network<T>({{"kind", "mlp"}, {"hidden", hidden}, {"seed", seed}}, std::move(layers));
}

template <typename T>
Network<T> build_cnn(const CnnArch& arch, std::uint64_t seed)
{
    arch.validate();
    Rng rng(seed);
    const bool two_d = arch.spatial_dims == 2;
    std::vector<std::unique_ptr<Layer<T>>> layers;

    ConvGeometry stem;
    stem.in_channels = 1;
    stem.out_channels = arch.k0;
    stem.kernel = {two_d ? arch.stem_spatial_kernel : 1, arch.stem_spatial_kernel, arch.stem_temporal_kernel};
    stem.stride = {1, 1, arch.stem_temporal_stride};
    auto conv = std::make_unique<ConvSt<T>>(stem, "stem");
    conv->init(rng);
    layers.push_back(std::move(conv));

    const std::array<std::size_t, 3> block_kernel{two_d ? arch.block_kernel : 1, arch.block_kernel,
                                                  arch.block_kernel};
    std::size_t channels = arch.k0;
    for (std::size_t b = 0; b < arch.blocks; ++b) {
        if (b > 0)
            layers.push_back(std::make_unique<AvgPool<T>>(std::array<bool, 3>{two_d, true, true}));
        auto block = std::make_unique<DenseBlock<T>>(channels, arch.layers_per_block, arch.growth, block_kernel,
                                                     "block" + std::to_string(b));
        block->init(rng);
        channels = block->out_channels();
        layers.push_back(std::move(block));
    }
    layers.push_back(std::make_unique<GlobalAvgPool<T>>());
    auto head = std::make_unique<FullyConnected<T>>(channels, 1, "head");
    head->init(rng);
    layers.push_back(std::move(head));

    nlohmann::json desc = arch;
    desc["kind"] = "cnn";
    desc["seed"] = seed;
    return Network<T>(std::move(desc), std::move(layers));
}

/// Rebuilds an untrained network from its architecture description.
template <typename T>
Network<T> build_from_architecture(const nlohmann::json& arch)
{
    const auto kind = arch.at("kind").get<std::string>();
    const auto seed = arch.at("seed").get<std::uint64_t>();
    if (kind == "mlp")
        return build_mlp<T>(arch.at("hidden").get<std::vector<std::size_t>>(), seed);
    if (kind == "cnn") {
        nlohmann::json a = arch;
        a.erase("kind");
        a.erase("seed");
        return build_cnn<T>(a.get<CnnArch>(), seed);
    }
    throw Error(Errc::InvalidSpec, "unknown network kind '" + kind + "'");
}

} // namespace oce::nn
