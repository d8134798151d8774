#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "oce/core/error.hpp"

namespace oce::nn {

/// Channel count plus three positional extents, time last. A 1D+t input
/// uses extents {1, y, t}; a 2D+t input {y, z, t}; a flat vector {1, 1, 1}.
struct Shape {
    std::size_t channels = 1;
    std::array<std::size_t, 3> ext{1, 1, 1};

    std::size_t positions() const { return ext[0] * ext[1] * ext[2]; }
    std::size_t size() const { return channels * positions(); }

    friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s)
{
    return "(" + std::to_string(s.channels) + "; " + std::to_string(s.ext[0]) + "x" + std::to_string(s.ext[1]) + "x" +
           std::to_string(s.ext[2]) + ")";
}

/// Channel-major activation: data[c][e0][e1][e2].
template <typename T>
struct Feature {
    Shape shape{};
    std::vector<T> data;

    Feature() = default;
    explicit Feature(const Shape& s, T fill = T{}) : shape(s), data(s.size(), fill) {}
    Feature(const Shape& s, std::vector<T> values) : shape(s), data(std::move(values))
    {
        if (data.size() != shape.size())
            throw Error(Errc::ShapeMismatch, "feature data does not match shape " + to_string(shape));
    }

    T* channel(std::size_t c) { return data.data() + c * shape.positions(); }
    const T* channel(std::size_t c) const { return data.data() + c * shape.positions(); }
};

template <typename T>
struct Param {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<T> value;
    std::vector<T> grad;

    Param() = default;
    Param(std::string n, std::vector<std::size_t> s) : name(std::move(n)), shape(std::move(s))
    {
        std::size_t count = 1;
        for (auto e : shape)
            count *= e;
        value.assign(count, T{});
        grad.assign(count, T{});
    }

    std::size_t size() const { return value.size(); }
};

/// A differentiable stage. forward() caches whatever backward() needs, so a
/// layer processes one sample at a time; backward() accumulates parameter
/// gradients and returns the gradient with respect to the forward input.
template <typename T>
class Layer {
public:
    virtual ~Layer() = default;

    virtual Shape output_shape(const Shape& in) const = 0;
    virtual Feature<T> forward(const Feature<T>& x) = 0;
    virtual Feature<T> backward(const Feature<T>& grad_out) = 0;
    virtual void collect_params(std::vector<Param<T>*>&) {}
    virtual nlohmann::json describe() const = 0;
};

} // namespace oce::nn
