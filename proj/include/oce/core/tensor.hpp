#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "oce/core/error.hpp"

namespace oce {

/// Dense row-major tensor with labelled axes. Axis labels are single
/// characters drawn from {c, y, z, t}; the last axis varies fastest.
template <typename T>
class BasicTensor {
public:
    using value_type = T;

    BasicTensor() = default;

    BasicTensor(std::vector<std::size_t> shape, std::string axes, T fill = T{})
        : shape_(std::move(shape)), axes_(std::move(axes))
    {
        validate_layout();
        data_.assign(element_count(shape_), fill);
    }

    BasicTensor(std::vector<std::size_t> shape, std::string axes, std::vector<T> data)
        : shape_(std::move(shape)), axes_(std::move(axes)), data_(std::move(data))
    {
        validate_layout();
        if (data_.size() != element_count(shape_))
            throw Error(Errc::ShapeMismatch, "data length " + std::to_string(data_.size()) +
                                                 " does not match shape product " +
                                                 std::to_string(element_count(shape_)));
    }

    static std::size_t element_count(const std::vector<std::size_t>& shape)
    {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
    }

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    const std::string& axes() const noexcept { return axes_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

    /// Extent of the axis labelled `label`; throws IndexOutOfRange if absent.
    std::size_t extent_of(char label) const { return shape_[axis_index(label)]; }

    std::size_t axis_index(char label) const
    {
        const auto pos = axes_.find(label);
        if (pos == std::string::npos)
            throw Error(Errc::IndexOutOfRange, std::string("tensor has no axis '") + label + "'");
        return pos;
    }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    std::size_t flat_index(std::initializer_list<std::size_t> index) const
    {
        std::size_t flat = 0;
        std::size_t axis = 0;
        for (auto i : index) {
            flat = flat * shape_[axis] + i;
            ++axis;
        }
        return flat;
    }

    T& operator()(std::size_t i) { return data_[i]; }
    const T& operator()(std::size_t i) const { return data_[i]; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    T& operator()(std::size_t i, std::size_t j, std::size_t k)
    {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    const T& operator()(std::size_t i, std::size_t j, std::size_t k) const
    {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    friend bool operator==(const BasicTensor& a, const BasicTensor& b)
    {
        return a.shape_ == b.shape_ && a.axes_ == b.axes_ && a.data_ == b.data_;
    }

private:
    void validate_layout() const
    {
        if (shape_.size() != axes_.size())
            throw Error(Errc::ShapeMismatch, "axis label count differs from rank");
        for (auto e : shape_)
            if (e == 0)
                throw Error(Errc::ShapeMismatch, "zero extent in shape");
        for (std::size_t i = 0; i < axes_.size(); ++i) {
            const char a = axes_[i];
            if (a != 'c' && a != 'y' && a != 'z' && a != 't')
                throw Error(Errc::ShapeMismatch, std::string("unknown axis label '") + a + "'");
            if (axes_.find(a, i + 1) != std::string::npos)
                throw Error(Errc::ShapeMismatch, std::string("duplicate axis label '") + a + "'");
        }
    }

    std::vector<std::size_t> shape_;
    std::string axes_;
    std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

} // namespace oce
