// Least squares Monte Carlo backward induction.
#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "lsmc/basis.hpp"
#include "lsmc/model.hpp"
#include "lsmc/regression.hpp"
#include "lsmc/simulate.hpp"
#include "lsmc/tensor.hpp"

namespace lsmc {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Regression coefficients: row (t, p) approximates the conditional
// expectation of the next-epoch value in position p given Z_t = z as
// <coeffs(t, p), basis(z)>, for t = 0 .. n_dec-2.
class ContinuationFit {
public:
    ContinuationFit() = default;
    ContinuationFit(std::size_t n_dec, std::size_t n_pos, std::size_t n_basis)
        : coeffs_(n_dec - 1, n_pos, n_basis) {}
    explicit ContinuationFit(Cube coeffs) : coeffs_(std::move(coeffs)) {}

    std::size_t n_dec() const { return coeffs_.dim(0) + 1; }
    std::size_t n_pos() const { return coeffs_.dim(1); }
    std::size_t n_basis() const { return coeffs_.dim(2); }

    std::span<double> coefficients(std::size_t t, std::size_t p) { return coeffs_.row(t, p); }
    std::span<const double> coefficients(std::size_t t, std::size_t p) const {
        return coeffs_.row(t, p);
    }

    const Cube& data() const { return coeffs_; }
    bool operator==(const ContinuationFit&) const = default;

private:
    Cube coeffs_;
};

struct LsmResult {
    ContinuationFit fit;
    RowMatrixXd path_values;       // [n_path x n_pos], realized values at t = 0
    Eigen::VectorXd value_estimate;  // column means of path_values
    Eigen::VectorXd std_error;       // sample sd / sqrt(n_path)
    RowMatrixXi policy_at_0;        // [n_path x n_pos]
};

LsmResult run_lsm(const PathPanel& paths, const MdpModel& model, const BasisSpec& spec,
                  const Regressor& regressor = Regressor::svd(), int threads = 1);

// Checks that the fit matches the model and basis; throws otherwise.
void check_fit(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec);

// [n x n_pos] continuation estimates <coeffs(t, p), X.row(i)>, summed in
// basis order so single-row and batch evaluations agree bit for bit.
RowMatrixXd continuation_values(const Eigen::MatrixXd& X, const ContinuationFit& fit, int t);

// Fitted value at epoch t in (1..T): scrap at T, otherwise the best action
// value using the fitted continuation. Returns [n x n_pos].
RowMatrixXd fitted_values(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec,
                          int t, const Eigen::MatrixXd& states);

// Fitted decision rule at epoch t in (0..T-1); ties go to the lowest action.
RowMatrixXi fitted_policy(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec,
                          int t, const Eigen::MatrixXd& states);

double fitted_value(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec, int t,
                    int p, const Eigen::VectorXd& z);

int fitted_policy_at(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec,
                     int t, int p, const Eigen::VectorXd& z);

// Index of the best action for (row i, position p), ties to the lowest index.
// `values` holds one entry per position: continuation estimates when choosing.
inline int best_action(const Cube& rewards, const TransitionKernel& kernel, std::size_t i, int p,
                       std::span<const double> values, double* best_value = nullptr) {
    const int n_action = static_cast<int>(rewards.dim(2));
    int best = 0;
    double best_q = 0.0;
    for (int a = 0; a < n_action; ++a) {
        const double q = rewards(i, static_cast<std::size_t>(p), static_cast<std::size_t>(a)) +
                         mix_unchecked(kernel, p, a, values);
        if (a == 0 || q > best_q) {
            best = a;
            best_q = q;
        }
    }
    if (best_value) *best_value = best_q;
    return best;
}

}  // namespace lsmc
