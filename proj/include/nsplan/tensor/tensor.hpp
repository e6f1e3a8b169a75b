#ifndef NSPLAN_TENSOR_TENSOR_HPP
#define NSPLAN_TENSOR_TENSOR_HPP

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "nsplan/errors.hpp"

namespace nsplan {

inline std::string shape_str(const std::vector<std::size_t>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

// Dense row-major tensor. Shape is fixed at creation.
template <typename T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape_, T fill = T(0))
        : shape(std::move(shape_)),
          data(std::accumulate(shape.begin(), shape.end(), std::size_t(1),
                               std::multiplies<>()),
               fill) {}
    Tensor(std::vector<std::size_t> shape_, std::vector<T> data_)
        : shape(std::move(shape_)), data(std::move(data_)) {
        if (data.size() != std::accumulate(shape.begin(), shape.end(), std::size_t(1),
                                           std::multiplies<>()))
            throw ShapeError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape));
    }

    std::size_t size() const { return data.size(); }
    std::size_t ndim() const { return shape.size(); }

    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    // element count of the last axis (1 for scalars of shape ())
    std::size_t last_extent() const { return shape.empty() ? 1 : shape.back(); }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out.shape = shape;
        out.data.assign(data.begin(), data.end());
        return out;
    }
};

inline std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> s(shape.size(), 1);
    for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i)
        s[i] = s[i + 1] * shape[i + 1];
    return s;
}

}  // namespace nsplan

#endif
