#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "hydronet/common.hpp"

namespace hydronet {

// Dense row-major tensor of doubles. The engine computes in 64-bit
// throughout; 32-bit precision appears only in weight files.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), 0.0);
    }

    static std::size_t numel_of(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (auto e : s) n *= e;
        return n;
    }

    static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }
    double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * shape[1] + j) * shape[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * shape[1] + j) * shape[2] + k];
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    std::string shape_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape.size(); ++i)
            s += (i ? "," : "") + std::to_string(shape[i]);
        return s + "]";
    }

    // Rows i of the leading (sample) axis selected by idxs.
    Tensor gather_rows(const std::vector<std::size_t>& idxs) const {
        if (shape.empty()) throw Error("Tensor::gather_rows: rank-0 tensor");
        const std::size_t row = numel() / shape[0];
        std::vector<std::size_t> s = shape;
        s[0] = idxs.size();
        Tensor out(std::move(s));
        for (std::size_t r = 0; r < idxs.size(); ++r) {
            if (idxs[r] >= shape[0]) throw Error("Tensor::gather_rows: index out of range");
            for (std::size_t k = 0; k < row; ++k) out.data[r * row + k] = data[idxs[r] * row + k];
        }
        return out;
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace hydronet
