#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "tsgan/common.hpp"

namespace tsgan::nn {

/// Dense row-major tensor of doubles. Rank is dynamic; the network code uses
/// {c,h,w} activations, {n} vectors, {m,n} matrices, and {1} scalars.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        v.assign(static_cast<std::size_t>(numel_of(shape)), 0.0);
    }
    Tensor(std::vector<int> s, std::vector<double> data)
        : shape(std::move(s)), v(std::move(data)) {
        require(static_cast<std::int64_t>(v.size()) == numel_of(shape),
                "Tensor: data size does not match shape");
    }

    static std::int64_t numel_of(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int d : s) n *= d;
        return n;
    }
    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
    static Tensor full(std::vector<int> s, double value) {
        Tensor t(std::move(s));
        for (double& x : t.v) x = value;
        return t;
    }
    static Tensor scalar(double value) { return Tensor({1}, {value}); }

    std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    double sum() const {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
};

}  // namespace tsgan::nn
