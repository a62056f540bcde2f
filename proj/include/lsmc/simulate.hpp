// Geometric Brownian motion path panels and nested one-step sub-simulations.
#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "lsmc/tensor.hpp"

namespace lsmc {

// Simulated continuous states; entry (i, j, k) is component j of Z_k on path i.
class PathPanel {
public:
    PathPanel() = default;
    PathPanel(std::size_t n_path, std::size_t dim, std::size_t n_dec)
        : data_(n_path, dim, n_dec) {}
    explicit PathPanel(Cube data) : data_(std::move(data)) {}

    std::size_t n_path() const { return data_.dim(0); }
    std::size_t dim() const { return data_.dim(1); }
    std::size_t n_dec() const { return data_.dim(2); }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_(i, j, k); }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_(i, j, k); }

    // Cross-section at epoch k as an [n_path x dim] matrix.
    Eigen::MatrixXd states(std::size_t k) const;

    const Cube& data() const { return data_; }
    bool operator==(const PathPanel&) const = default;

private:
    Cube data_;
};

// Entry (s, j, k, l) is component j of one transition from Z_l(omega_k)
// driven by the s-th nested draw, i.e. a sample of Z_{l+1} given Z_l.
class SubsimPanel {
public:
    SubsimPanel() = default;
    SubsimPanel(std::size_t n_subsim, std::size_t dim, std::size_t n_path, std::size_t n_step)
        : data_(n_subsim, dim, n_path, n_step) {}

    std::size_t n_subsim() const { return data_.dim(0); }
    std::size_t dim() const { return data_.dim(1); }
    std::size_t n_path() const { return data_.dim(2); }
    std::size_t n_step() const { return data_.dim(3); }

    double& operator()(std::size_t s, std::size_t j, std::size_t k, std::size_t l) {
        return data_(s, j, k, l);
    }
    double operator()(std::size_t s, std::size_t j, std::size_t k, std::size_t l) const {
        return data_(s, j, k, l);
    }

    const Tensor4& data() const { return data_; }
    bool operator==(const SubsimPanel&) const = default;

private:
    Tensor4 data_;
};

// Per-step parameters: drift and vol are already scaled by the time step
// (drift = rate * step, vol = sigma * sqrt(step)).
struct GbmParams {
    double start = 1.0;
    double drift = 0.0;
    double vol = 0.0;
    bool antithetic = false;
};

// One GBM step from z driven by the standard normal w.
inline double gbm_step(double z, double drift, double vol, double w) {
    return std::exp(drift - 0.5 * vol * vol + vol * w) * z;
}

// dim = 1 panel. With antithetic sampling path 2m+1 uses the negated normals
// of path 2m. Bit-identical for a given seed regardless of `threads`.
PathPanel gbm_paths(const GbmParams& params, std::size_t n_dec, std::size_t n_path,
                    std::uint64_t seed, int threads = 1);

// n_subsim one-step GBM draws from every (path, epoch < T) node of `paths`,
// each component moved independently. Draw streams are disjoint from those
// used by gbm_paths. With antithetic sampling n_subsim must be even and draw
// s + n_subsim/2 negates draw s.
SubsimPanel nested_gbm(const PathPanel& paths, const GbmParams& params, std::size_t n_subsim,
                       std::uint64_t seed, int threads = 1);

}  // namespace lsmc
