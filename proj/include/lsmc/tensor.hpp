// Dense row-major 3-D and 4-D arrays used for panels, rewards and fits.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lsmc {

class Cube {
public:
    Cube() = default;
    Cube(std::size_t n0, std::size_t n1, std::size_t n2, double fill = 0.0)
        : dims_{n0, n1, n2}, data_(n0 * n1 * n2, fill) {}

    std::size_t dim(std::size_t axis) const { return dims_[axis]; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * dims_[1] + j) * dims_[2] + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * dims_[1] + j) * dims_[2] + k];
    }

    // Contiguous innermost run at (i, j, ·).
    std::span<double> row(std::size_t i, std::size_t j) {
        return {data_.data() + (i * dims_[1] + j) * dims_[2], dims_[2]};
    }
    std::span<const double> row(std::size_t i, std::size_t j) const {
        return {data_.data() + (i * dims_[1] + j) * dims_[2], dims_[2]};
    }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool operator==(const Cube&) const = default;

private:
    std::array<std::size_t, 3> dims_{0, 0, 0};
    std::vector<double> data_;
};

class Tensor4 {
public:
    Tensor4() = default;
    Tensor4(std::size_t n0, std::size_t n1, std::size_t n2, std::size_t n3, double fill = 0.0)
        : dims_{n0, n1, n2, n3}, data_(n0 * n1 * n2 * n3, fill) {}

    std::size_t dim(std::size_t axis) const { return dims_[axis]; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[((i * dims_[1] + j) * dims_[2] + k) * dims_[3] + l];
    }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool operator==(const Tensor4&) const = default;

private:
    std::array<std::size_t, 4> dims_{0, 0, 0, 0};
    std::vector<double> data_;
};

}  // namespace lsmc
