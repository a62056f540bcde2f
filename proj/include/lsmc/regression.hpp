// Least-squares backends for the continuation-value regressions.
//
// fit_svd returns the minimum-norm solution with singular values below
// rcond * sigma_max treated as zero. fit_qr uses Householder QR with limited
// column pivoting: a column whose remaining norm falls below tol times its
// original norm is moved to the end and gets coefficient 0. The two agree on
// full-rank problems and produce the same fitted values under exact column
// replication, but pick different coefficient vectors when rank deficient.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace lsmc {

using Coefficients = Eigen::VectorXd;

// (X [n x m], y [n], epoch t) -> m coefficients. Non-finite entries in the
// result are replaced by 0 before use.
using RegressorFn =
    std::function<Coefficients(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int t)>;

inline constexpr double kQrTolerance = 1e-7;

double default_rcond(Eigen::Index n, Eigen::Index m);

class SvdSolver {
public:
    explicit SvdSolver(const Eigen::MatrixXd& X, std::optional<double> rcond = std::nullopt);

    Coefficients solve(const Eigen::VectorXd& y) const;
    Eigen::Index rank() const { return rank_; }
    const Eigen::VectorXd& singular_values() const { return sigma_; }

private:
    Eigen::MatrixXd u_;
    Eigen::MatrixXd v_;
    Eigen::VectorXd sigma_;
    Eigen::VectorXd inv_sigma_;
    Eigen::Index rank_ = 0;
};

class PivotedQrSolver {
public:
    explicit PivotedQrSolver(const Eigen::MatrixXd& X, double tol = kQrTolerance);

    Coefficients solve(const Eigen::VectorXd& y) const;
    Eigen::Index rank() const { return rank_; }
    // pivot()[k] is the original column stored at position k.
    const std::vector<Eigen::Index>& pivot() const { return pivot_; }

private:
    Eigen::MatrixXd qr_;                   // R on and above the diagonal
    std::vector<Eigen::VectorXd> reflectors_;
    std::vector<double> betas_;
    std::vector<Eigen::Index> pivot_;
    Eigen::Index rank_ = 0;
    Eigen::Index rows_ = 0;
};

Coefficients fit_svd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::optional<double> rcond = std::nullopt);

Coefficients fit_qr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol = kQrTolerance);

// Calls the user regressor, checks the length and zeroes undefined entries.
Coefficients apply_regressor(const RegressorFn& fn, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, int t);

// Backend selection used by the backward induction. Built-in backends
// factorize X once and solve every target column against it.
class Regressor {
public:
    enum class Backend { Svd, Qr, Custom };

    static Regressor svd(std::optional<double> rcond = std::nullopt);
    static Regressor qr(double tol = kQrTolerance);
    static Regressor custom(RegressorFn fn);

    Backend backend() const { return backend_; }

    // Returns [m x k]: column c fits targets.col(c) on X.
    Eigen::MatrixXd fit_columns(const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets,
                                int t) const;

private:
    Backend backend_ = Backend::Svd;
    std::optional<double> rcond_;
    double tol_ = kQrTolerance;
    RegressorFn fn_;
};

}  // namespace lsmc
