#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wristview/errors.hpp"

namespace wristview {

// Minimal row-major dense tensor of doubles.
struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> d) : dims(std::move(d)) {
        data.assign(element_count(dims), 0.0);
    }

    static std::size_t element_count(const std::vector<std::size_t>& d) {
        std::size_t n = 1;
        for (std::size_t x : d) n *= x;
        return n;
    }

    std::size_t rank() const { return dims.size(); }
    std::size_t size() const { return data.size(); }

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }
    double& at(std::size_t i, std::size_t j) { return data[i * dims[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * dims[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * dims[1] + j) * dims[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * dims[1] + j) * dims[2] + k];
    }

    void require_rank(std::size_t r, const std::string& name) const {
        if (rank() != r) {
            throw ShapeMismatch(name + ": expected rank " + std::to_string(r) + ", got " +
                                std::to_string(rank()));
        }
    }

    bool operator==(const Tensor& o) const { return dims == o.dims && data == o.data; }
};

} // namespace wristview
