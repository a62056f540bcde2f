// Pathwise duality bounds built from a fitted continuation.
//
// The prescribed policy is the fitted decision rule applied to a fresh
// evaluation panel. Martingale increments use nested one-step simulation:
//
//   delta(i, t, q) = mean_s v(t+1, q, Z^(s)_{t+1}) - v(t+1, q, Z_{t+1}(omega_i))
//
// where v is the fitted value function (scrap at T) and Z^(s)_{t+1} are
// nested successors of Z_t(omega_i). The penalty for action a in position p
// is phi = sum_q alpha^a_{p,q} delta(i, t, q).
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "lsmc/basis.hpp"
#include "lsmc/lsm.hpp"
#include "lsmc/model.hpp"
#include "lsmc/simulate.hpp"
#include "lsmc/tensor.hpp"

namespace lsmc {

class PolicyTable {
public:
    PolicyTable() = default;
    PolicyTable(std::size_t n_path, std::size_t n_step, std::size_t n_pos)
        : n_path_(n_path), n_step_(n_step), n_pos_(n_pos), actions_(n_path * n_step * n_pos, 0) {}

    std::size_t n_path() const { return n_path_; }
    std::size_t n_step() const { return n_step_; }
    std::size_t n_pos() const { return n_pos_; }

    int& operator()(std::size_t i, std::size_t t, std::size_t p) {
        return actions_[(i * n_step_ + t) * n_pos_ + p];
    }
    int operator()(std::size_t i, std::size_t t, std::size_t p) const {
        return actions_[(i * n_step_ + t) * n_pos_ + p];
    }

    bool operator==(const PolicyTable&) const = default;

private:
    std::size_t n_path_ = 0;
    std::size_t n_step_ = 0;
    std::size_t n_pos_ = 0;
    std::vector<int> actions_;
};

// [n_path x (n_dec-1) x n_pos], entry (i, t, q) as described above.
using MartIncrements = Cube;

struct BoundResult {
    RowMatrixXd lower;  // [n_path x n_pos], indexed by starting position
    RowMatrixXd upper;
    Eigen::VectorXd mean_lower;
    Eigen::VectorXd se_lower;
    Eigen::VectorXd mean_upper;
    Eigen::VectorXd se_upper;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

PolicyTable path_policy(const PathPanel& paths, const ContinuationFit& fit, const MdpModel& model,
                        const BasisSpec& spec, int threads = 1);

MartIncrements additive_duals(const PathPanel& paths, const SubsimPanel& subsim,
                              const ContinuationFit& fit, const MdpModel& model,
                              const BasisSpec& spec, int threads = 1);

// Lower: value of following `policy` with penalties, integrated over the
// position chain (exact for stochastic kernels). Upper: perfect-foresight
// dynamic program over the same penalised rewards. Both are computed
// backward so upper >= lower holds exactly in floating point.
BoundResult bounds(const PathPanel& paths, const MdpModel& model, const MartIncrements& mart,
                   const PolicyTable& policy, int threads = 1);

// (mean_lower - q se_lower, mean_upper + q se_upper) with q the normal
// quantile at 1 - alpha/2.
Interval confidence_interval(const BoundResult& result, double alpha, int p);

}  // namespace lsmc
