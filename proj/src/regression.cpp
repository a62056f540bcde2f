#include "lsmc/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lsmc {

namespace {

void check_problem(const Eigen::MatrixXd& X) {
    if (X.rows() < 1 || X.cols() < 1) {
        throw std::invalid_argument("regression needs at least one row and one column");
    }
    if (!X.allFinite()) throw std::invalid_argument("regression design matrix has non-finite entries");
}

void check_target(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (y.size() != X.rows()) {
        throw std::invalid_argument("regression target has " + std::to_string(y.size()) +
                                    " rows, design matrix has " + std::to_string(X.rows()));
    }
    if (!y.allFinite()) throw std::invalid_argument("regression target has non-finite entries");
}

}  // namespace

double default_rcond(Eigen::Index n, Eigen::Index m) {
    return static_cast<double>(std::max(n, m)) * std::numeric_limits<double>::epsilon();
}

SvdSolver::SvdSolver(const Eigen::MatrixXd& X, std::optional<double> rcond) {
    check_problem(X);
    const double cutoff_ratio = rcond.value_or(default_rcond(X.rows(), X.cols()));
    if (!(cutoff_ratio >= 0.0)) throw std::invalid_argument("rcond must be nonnegative");

    Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner> svd(
        X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u_ = svd.matrixU();
    v_ = svd.matrixV();
    sigma_ = svd.singularValues();

    inv_sigma_ = Eigen::VectorXd::Zero(sigma_.size());
    const double sigma_max = sigma_.size() > 0 ? sigma_(0) : 0.0;
    if (sigma_max > 0.0) {
        const double cutoff = cutoff_ratio * sigma_max;
        for (Eigen::Index k = 0; k < sigma_.size(); ++k) {
            if (sigma_(k) > 0.0 && sigma_(k) >= cutoff) {
                inv_sigma_(k) = 1.0 / sigma_(k);
                ++rank_;
            }
        }
    }
}

Coefficients SvdSolver::solve(const Eigen::VectorXd& y) const {
    if (y.size() != u_.rows()) {
        throw std::invalid_argument("regression target has " + std::to_string(y.size()) +
                                    " rows, design matrix has " + std::to_string(u_.rows()));
    }
    if (!y.allFinite()) throw std::invalid_argument("regression target has non-finite entries");
    const Eigen::VectorXd projected = u_.transpose() * y;
    return v_ * inv_sigma_.cwiseProduct(projected);
}

PivotedQrSolver::PivotedQrSolver(const Eigen::MatrixXd& X, double tol)
    : qr_(X), rows_(X.rows()) {
    check_problem(X);
    if (!(tol >= 0.0)) throw std::invalid_argument("QR tolerance must be nonnegative");

    const Eigen::Index n = X.rows();
    const Eigen::Index m = X.cols();
    pivot_.resize(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) pivot_[static_cast<std::size_t>(j)] = j;

    // Reference norms; zero columns compare against 1 so they are always
    // declared dependent.
    std::vector<double> reference(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const double norm = qr_.col(j).norm();
        reference[static_cast<std::size_t>(j)] = norm > 0.0 ? norm : 1.0;
    }

    Eigen::Index active = m;  // columns [active, m) were judged dependent
    const Eigen::Index steps = std::min(n, m);
    for (Eigen::Index l = 0; l < steps && l < active; ++l) {
        // Move columns that have become negligible to the end.
        while (l < active) {
            const double remaining = qr_.col(l).tail(n - l).norm();
            if (remaining >= tol * reference[static_cast<std::size_t>(l)] && remaining > 0.0) break;
            // Rotate column l to the end, shifting the rest left.
            const Eigen::VectorXd moved = qr_.col(l);
            const Eigen::Index moved_pivot = pivot_[static_cast<std::size_t>(l)];
            const double moved_ref = reference[static_cast<std::size_t>(l)];
            for (Eigen::Index j = l; j + 1 < m; ++j) {
                qr_.col(j) = qr_.col(j + 1);
                pivot_[static_cast<std::size_t>(j)] = pivot_[static_cast<std::size_t>(j + 1)];
                reference[static_cast<std::size_t>(j)] = reference[static_cast<std::size_t>(j + 1)];
            }
            qr_.col(m - 1) = moved;
            pivot_[static_cast<std::size_t>(m - 1)] = moved_pivot;
            reference[static_cast<std::size_t>(m - 1)] = moved_ref;
            --active;
        }
        if (l >= active) break;

        // Householder reflector annihilating qr_(l+1:n, l).
        Eigen::VectorXd v = qr_.col(l).tail(n - l);
        const double norm = v.norm();
        const double alpha = v(0) >= 0.0 ? -norm : norm;
        v(0) -= alpha;
        const double vnorm2 = v.squaredNorm();
        const double beta = vnorm2 > 0.0 ? 2.0 / vnorm2 : 0.0;
        for (Eigen::Index j = l + 1; j < m; ++j) {
            const double proj = beta * v.dot(qr_.col(j).tail(n - l));
            qr_.col(j).tail(n - l) -= proj * v;
        }
        qr_(l, l) = alpha;
        qr_.col(l).tail(n - l - 1).setZero();
        reflectors_.push_back(std::move(v));
        betas_.push_back(beta);
    }
    rank_ = static_cast<Eigen::Index>(reflectors_.size());
}

Coefficients PivotedQrSolver::solve(const Eigen::VectorXd& y) const {
    if (y.size() != rows_) {
        throw std::invalid_argument("regression target has " + std::to_string(y.size()) +
                                    " rows, design matrix has " + std::to_string(rows_));
    }
    if (!y.allFinite()) throw std::invalid_argument("regression target has non-finite entries");
    const Eigen::Index n = rows_;
    Eigen::VectorXd qty = y;
    for (std::size_t k = 0; k < reflectors_.size(); ++k) {
        const auto l = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd& v = reflectors_[k];
        const double proj = betas_[k] * v.dot(qty.tail(n - l));
        qty.tail(n - l) -= proj * v;
    }
    Eigen::VectorXd permuted = Eigen::VectorXd::Zero(qr_.cols());
    for (Eigen::Index k = rank_ - 1; k >= 0; --k) {
        double acc = qty(k);
        for (Eigen::Index j = k + 1; j < rank_; ++j) acc -= qr_(k, j) * permuted(j);
        permuted(k) = acc / qr_(k, k);
    }
    Coefficients out = Coefficients::Zero(qr_.cols());
    for (Eigen::Index k = 0; k < qr_.cols(); ++k) out(pivot_[static_cast<std::size_t>(k)]) = permuted(k);
    return out;
}

Coefficients fit_svd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::optional<double> rcond) {
    check_problem(X);
    check_target(X, y);
    return SvdSolver(X, rcond).solve(y);
}

Coefficients fit_qr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol) {
    check_problem(X);
    check_target(X, y);
    return PivotedQrSolver(X, tol).solve(y);
}

Coefficients apply_regressor(const RegressorFn& fn, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, int t) {
    if (!fn) throw std::invalid_argument("custom regressor is not set");
    Coefficients out = fn(X, y, t);
    if (out.size() != X.cols()) {
        throw std::invalid_argument("custom regressor returned " + std::to_string(out.size()) +
                                    " coefficients, expected " + std::to_string(X.cols()));
    }
    for (Eigen::Index k = 0; k < out.size(); ++k) {
        if (!std::isfinite(out(k))) out(k) = 0.0;
    }
    return out;
}

Regressor Regressor::svd(std::optional<double> rcond) {
    Regressor r;
    r.backend_ = Backend::Svd;
    r.rcond_ = rcond;
    return r;
}

Regressor Regressor::qr(double tol) {
    Regressor r;
    r.backend_ = Backend::Qr;
    r.tol_ = tol;
    return r;
}

Regressor Regressor::custom(RegressorFn fn) {
    if (!fn) throw std::invalid_argument("custom regressor is not set");
    Regressor r;
    r.backend_ = Backend::Custom;
    r.fn_ = std::move(fn);
    return r;
}

Eigen::MatrixXd Regressor::fit_columns(const Eigen::MatrixXd& X, const Eigen::MatrixXd& targets,
                                       int t) const {
    check_problem(X);
    if (targets.rows() != X.rows()) {
        throw std::invalid_argument("regression targets have " + std::to_string(targets.rows()) +
                                    " rows, design matrix has " + std::to_string(X.rows()));
    }
    Eigen::MatrixXd out(X.cols(), targets.cols());
    switch (backend_) {
        case Backend::Svd: {
            const SvdSolver solver(X, rcond_);
            for (Eigen::Index c = 0; c < targets.cols(); ++c) out.col(c) = solver.solve(targets.col(c));
            break;
        }
        case Backend::Qr: {
            const PivotedQrSolver solver(X, tol_);
            for (Eigen::Index c = 0; c < targets.cols(); ++c) out.col(c) = solver.solve(targets.col(c));
            break;
        }
        case Backend::Custom:
            for (Eigen::Index c = 0; c < targets.cols(); ++c) {
                out.col(c) = apply_regressor(fn_, X, targets.col(c), t);
            }
            break;
    }
    return out;
}

}  // namespace lsmc
