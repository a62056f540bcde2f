#include "lsmc/lsm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lsmc/parallel.hpp"
#include "lsmc/stats.hpp"

namespace lsmc {

namespace {

std::span<const double> row_span(const RowMatrixXd& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

void check_panel(const PathPanel& paths, const MdpModel& model) {
    if (paths.n_dec() != static_cast<std::size_t>(model.n_dec)) {
        throw std::invalid_argument("path panel has " + std::to_string(paths.n_dec()) +
                                    " epochs, model expects " + std::to_string(model.n_dec));
    }
    if (paths.dim() != static_cast<std::size_t>(model.dim)) {
        throw std::invalid_argument("path panel has dimension " + std::to_string(paths.dim()) +
                                    ", model expects " + std::to_string(model.dim));
    }
    if (paths.n_path() < 1) throw std::invalid_argument("path panel is empty");
}

void check_epoch(int t, int lo, int hi, const char* what) {
    if (t < lo || t > hi) {
        throw std::out_of_range(std::string(what) + ": epoch " + std::to_string(t) +
                                " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

}  // namespace

void check_fit(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec) {
    if (fit.n_dec() != static_cast<std::size_t>(model.n_dec) ||
        fit.n_pos() != static_cast<std::size_t>(model.n_pos) ||
        fit.n_basis() != basis_dimension(spec)) {
        throw std::invalid_argument(
            "continuation fit shape (n_dec=" + std::to_string(fit.n_dec()) +
            ", n_pos=" + std::to_string(fit.n_pos()) + ", m=" + std::to_string(fit.n_basis()) +
            ") does not match model/basis (n_dec=" + std::to_string(model.n_dec) +
            ", n_pos=" + std::to_string(model.n_pos) +
            ", m=" + std::to_string(basis_dimension(spec)) + ")");
    }
}

RowMatrixXd continuation_values(const Eigen::MatrixXd& X, const ContinuationFit& fit, int t) {
    const auto n_pos = static_cast<Eigen::Index>(fit.n_pos());
    const auto m = static_cast<Eigen::Index>(fit.n_basis());
    if (X.cols() != m) {
        throw std::invalid_argument("design matrix has " + std::to_string(X.cols()) +
                                    " columns, fit has " + std::to_string(m));
    }
    RowMatrixXd out(X.rows(), n_pos);
    for (Eigen::Index p = 0; p < n_pos; ++p) {
        const auto beta = fit.coefficients(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < m; ++k) acc += X(i, k) * beta[static_cast<std::size_t>(k)];
            out(i, p) = acc;
        }
    }
    return out;
}

RowMatrixXd fitted_values(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec,
                          int t, const Eigen::MatrixXd& states) {
    check_epoch(t, 1, model.horizon(), "fitted_values");
    check_fit(fit, model, spec);
    if (t == model.horizon()) return evaluate_scrap(model, states);

    const RowMatrixXd cont = continuation_values(design_values(states, spec), fit, t);
    const Cube rewards = evaluate_reward(model, states, t);
    RowMatrixXd out(states.rows(), model.n_pos);
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
        for (int p = 0; p < model.n_pos; ++p) {
            double best = 0.0;
            best_action(rewards, model.kernel, static_cast<std::size_t>(i), p, row_span(cont, i), &best);
            out(i, p) = best;
        }
    }
    return out;
}

RowMatrixXi fitted_policy(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec,
                          int t, const Eigen::MatrixXd& states) {
    check_epoch(t, 0, model.horizon() - 1, "fitted_policy");
    check_fit(fit, model, spec);
    const RowMatrixXd cont = continuation_values(design_values(states, spec), fit, t);
    const Cube rewards = evaluate_reward(model, states, t);
    RowMatrixXi out(states.rows(), model.n_pos);
    for (Eigen::Index i = 0; i < states.rows(); ++i) {
        for (int p = 0; p < model.n_pos; ++p) {
            out(i, p) = best_action(rewards, model.kernel, static_cast<std::size_t>(i), p, row_span(cont, i));
        }
    }
    return out;
}

double fitted_value(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec, int t,
                    int p, const Eigen::VectorXd& z) {
    if (p < 0 || p >= model.n_pos) throw std::out_of_range("fitted_value: position out of range");
    return fitted_values(fit, model, spec, t, z.transpose())(0, p);
}

int fitted_policy_at(const ContinuationFit& fit, const MdpModel& model, const BasisSpec& spec,
                     int t, int p, const Eigen::VectorXd& z) {
    if (p < 0 || p >= model.n_pos) throw std::out_of_range("fitted_policy_at: position out of range");
    return fitted_policy(fit, model, spec, t, z.transpose())(0, p);
}

LsmResult run_lsm(const PathPanel& paths, const MdpModel& model, const BasisSpec& spec,
                  const Regressor& regressor, int threads) {
    require_valid(model);
    validate_basis(spec, static_cast<std::size_t>(model.dim));
    check_panel(paths, model);

    const auto n_path = static_cast<Eigen::Index>(paths.n_path());
    const int horizon = model.horizon();
    const std::size_t m = basis_dimension(spec);

    LsmResult result;
    result.fit = ContinuationFit(static_cast<std::size_t>(model.n_dec),
                                 static_cast<std::size_t>(model.n_pos), m);

    RowMatrixXd next = evaluate_scrap(model, paths.states(static_cast<std::size_t>(horizon)));
    RowMatrixXd current(n_path, model.n_pos);

    for (int t = horizon - 1; t >= 0; --t) {
        const Eigen::MatrixXd states = paths.states(static_cast<std::size_t>(t));
        const Eigen::MatrixXd X = design_values(states, spec);

        // One regression per successor position; all share X.
        const Eigen::MatrixXd beta = regressor.fit_columns(X, next, t);
        for (int p = 0; p < model.n_pos; ++p) {
            auto dst = result.fit.coefficients(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
            for (std::size_t k = 0; k < m; ++k) dst[k] = beta(static_cast<Eigen::Index>(k), p);
        }

        const RowMatrixXd cont = continuation_values(X, result.fit, t);
        const Cube rewards = evaluate_reward(model, states, t);
        if (t == 0) result.policy_at_0.resize(n_path, model.n_pos);

        parallel_for(static_cast<std::size_t>(n_path), threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto row = static_cast<Eigen::Index>(i);
                for (int p = 0; p < model.n_pos; ++p) {
                    const int a = best_action(rewards, model.kernel, i, p, row_span(cont, row));
                    current(row, p) = rewards(i, static_cast<std::size_t>(p), static_cast<std::size_t>(a)) +
                                      mix_unchecked(model.kernel, p, a, row_span(next, row));
                    if (t == 0) result.policy_at_0(row, p) = a;
                }
            }
        });
        std::swap(next, current);
    }

    result.path_values = next;
    result.value_estimate.resize(model.n_pos);
    result.std_error.resize(model.n_pos);
    for (int p = 0; p < model.n_pos; ++p) {
        const MeanSe summary = mean_and_se(next.col(p));
        result.value_estimate(p) = summary.mean;
        result.std_error(p) = summary.se;
    }
    return result;
}

}  // namespace lsmc
