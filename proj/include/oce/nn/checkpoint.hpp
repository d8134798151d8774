#pragma once

// Model checkpoints: one container file holding all parameters as a flat
// channel vector, with the architecture in the JSON header.

#include <filesystem>

#include "oce/core/tensor_io.hpp"
#include "oce/nn/network.hpp"

namespace oce::nn {

inline void write_checkpoint(const std::filesystem::path& path, const Network<float>& net,
                             const nlohmann::json& extra = nlohmann::json::object())
{
    const auto flat = net.flat_parameters();
    nlohmann::json meta = extra;
    meta["architecture"] = net.architecture();
    nlohmann::json layout = nlohmann::json::array();
    for (const auto* p : net.params())
        layout.push_back({{"name", p->name}, {"shape", p->shape}});
    meta["parameters"] = layout;
    const std::array<std::size_t, 1> shape{flat.size()};
    write_tensor(path, shape, "c", flat, meta);
}

struct Checkpoint {
    Network<float> network;
    nlohmann::json meta;
};

inline Checkpoint read_checkpoint(const std::filesystem::path& path)
{
    auto file = read_tensor_file(path);
    if (!file.meta.contains("architecture"))
        throw Error(Errc::ShapeMismatch, path.string() + " has no architecture header");
    Checkpoint ck{build_from_architecture<float>(file.meta.at("architecture")), file.meta};
    const auto values = file.tensor.values();
    ck.network.set_flat_parameters(std::vector<float>(values.begin(), values.end()));
    return ck;
}

} // namespace oce::nn
