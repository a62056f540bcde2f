#include "lsmc/dual.hpp"

#include <stdexcept>
#include <string>

#include "lsmc/parallel.hpp"
#include "lsmc/stats.hpp"

namespace lsmc {

namespace {

void check_panel(const PathPanel& paths, const MdpModel& model) {
    if (paths.n_dec() != static_cast<std::size_t>(model.n_dec) ||
        paths.dim() != static_cast<std::size_t>(model.dim) || paths.n_path() < 1) {
        throw std::invalid_argument("evaluation panel [" + std::to_string(paths.n_path()) + " x " +
                                    std::to_string(paths.dim()) + " x " +
                                    std::to_string(paths.n_dec()) + "] does not match the model");
    }
}

}  // namespace

PolicyTable path_policy(const PathPanel& paths, const ContinuationFit& fit, const MdpModel& model,
                        const BasisSpec& spec, int threads) {
    require_valid(model);
    check_panel(paths, model);
    check_fit(fit, model, spec);

    const std::size_t n_step = paths.n_dec() - 1;
    PolicyTable policy(paths.n_path(), n_step, static_cast<std::size_t>(model.n_pos));
    parallel_for(n_step, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const RowMatrixXi actions = fitted_policy(fit, model, spec, static_cast<int>(t), paths.states(t));
            for (std::size_t i = 0; i < paths.n_path(); ++i) {
                for (int p = 0; p < model.n_pos; ++p) {
                    policy(i, t, static_cast<std::size_t>(p)) = actions(static_cast<Eigen::Index>(i), p);
                }
            }
        }
    });
    return policy;
}

MartIncrements additive_duals(const PathPanel& paths, const SubsimPanel& subsim,
                              const ContinuationFit& fit, const MdpModel& model,
                              const BasisSpec& spec, int threads) {
    require_valid(model);
    check_panel(paths, model);
    check_fit(fit, model, spec);
    const std::size_t n_path = paths.n_path();
    const std::size_t n_step = paths.n_dec() - 1;
    const std::size_t dim = paths.dim();
    if (subsim.n_path() != n_path || subsim.n_step() != n_step || subsim.dim() != dim) {
        throw std::invalid_argument("nested panel [" + std::to_string(subsim.n_subsim()) + " x " +
                                    std::to_string(subsim.dim()) + " x " +
                                    std::to_string(subsim.n_path()) + " x " +
                                    std::to_string(subsim.n_step()) +
                                    "] does not match the evaluation panel");
    }
    const std::size_t n_sub = subsim.n_subsim();
    if (n_sub < 1) throw std::invalid_argument("nested panel has no draws");

    const auto n_pos = static_cast<std::size_t>(model.n_pos);
    MartIncrements delta(n_path, n_step, n_pos);

    for (std::size_t t = 0; t < n_step; ++t) {
        const int next_epoch = static_cast<int>(t) + 1;
        const RowMatrixXd realized = fitted_values(fit, model, spec, next_epoch, paths.states(t + 1));

        parallel_for(n_path, threads, [&](std::size_t begin, std::size_t end) {
            const auto rows = static_cast<Eigen::Index>((end - begin) * n_sub);
            Eigen::MatrixXd nested(rows, static_cast<Eigen::Index>(dim));
            for (std::size_t k = begin; k < end; ++k) {
                for (std::size_t s = 0; s < n_sub; ++s) {
                    const auto r = static_cast<Eigen::Index>((k - begin) * n_sub + s);
                    for (std::size_t j = 0; j < dim; ++j) {
                        nested(r, static_cast<Eigen::Index>(j)) = subsim(s, j, k, t);
                    }
                }
            }
            const RowMatrixXd nested_values = fitted_values(fit, model, spec, next_epoch, nested);
            for (std::size_t k = begin; k < end; ++k) {
                for (std::size_t q = 0; q < n_pos; ++q) {
                    // Differences first, so identical draws give exactly zero.
                    const double here = realized(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q));
                    double sum = 0.0;
                    for (std::size_t s = 0; s < n_sub; ++s) {
                        sum += nested_values(static_cast<Eigen::Index>((k - begin) * n_sub + s),
                                             static_cast<Eigen::Index>(q)) - here;
                    }
                    delta(k, t, q) = sum / static_cast<double>(n_sub);
                }
            }
        });
    }
    return delta;
}

BoundResult bounds(const PathPanel& paths, const MdpModel& model, const MartIncrements& mart,
                   const PolicyTable& policy, int threads) {
    require_valid(model);
    check_panel(paths, model);
    const std::size_t n_path = paths.n_path();
    const std::size_t n_step = paths.n_dec() - 1;
    const auto n_pos = static_cast<std::size_t>(model.n_pos);
    if (mart.dim(0) != n_path || mart.dim(1) != n_step || mart.dim(2) != n_pos) {
        throw std::invalid_argument("martingale increments do not match the evaluation panel");
    }
    if (policy.n_path() != n_path || policy.n_step() != n_step || policy.n_pos() != n_pos) {
        throw std::invalid_argument("policy table does not match the evaluation panel");
    }

    // Rewards for every epoch, evaluated once per cross-section.
    std::vector<Cube> rewards(n_step);
    parallel_for(n_step, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            rewards[t] = evaluate_reward(model, paths.states(t), static_cast<int>(t));
        }
    });
    const Eigen::MatrixXd scrap = evaluate_scrap(model, paths.states(n_step));

    BoundResult out;
    out.lower.resize(static_cast<Eigen::Index>(n_path), model.n_pos);
    out.upper.resize(static_cast<Eigen::Index>(n_path), model.n_pos);

    parallel_for(n_path, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> lower(n_pos), upper(n_pos), lower_next(n_pos), upper_next(n_pos);
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t p = 0; p < n_pos; ++p) {
                lower[p] = upper[p] = scrap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p));
            }
            for (std::size_t tt = n_step; tt-- > 0;) {
                for (std::size_t q = 0; q < n_pos; ++q) {
                    lower_next[q] = mart(i, tt, q) + lower[q];
                    upper_next[q] = mart(i, tt, q) + upper[q];
                }
                const Cube& r = rewards[tt];
                for (std::size_t p = 0; p < n_pos; ++p) {
                    const int pi = static_cast<int>(p);
                    const int a = policy(i, tt, p);
                    if (a < 0 || a >= model.n_action) {
                        throw std::invalid_argument("policy table holds an invalid action index");
                    }
                    lower[p] = r(i, p, static_cast<std::size_t>(a)) +
                               mix_unchecked(model.kernel, pi, a, lower_next);
                    double best = 0.0;
                    best_action(r, model.kernel, i, pi, upper_next, &best);
                    upper[p] = best;
                }
            }
            for (std::size_t p = 0; p < n_pos; ++p) {
                out.lower(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = lower[p];
                out.upper(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = upper[p];
            }
        }
    });

    out.mean_lower.resize(model.n_pos);
    out.se_lower.resize(model.n_pos);
    out.mean_upper.resize(model.n_pos);
    out.se_upper.resize(model.n_pos);
    for (int p = 0; p < model.n_pos; ++p) {
        const MeanSe lo = mean_and_se(out.lower.col(p));
        const MeanSe hi = mean_and_se(out.upper.col(p));
        out.mean_lower(p) = lo.mean;
        out.se_lower(p) = lo.se;
        out.mean_upper(p) = hi.mean;
        out.se_upper(p) = hi.se;
    }
    return out;
}

Interval confidence_interval(const BoundResult& result, double alpha, int p) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (result.lower.rows() < 2) {
        throw std::invalid_argument("confidence interval needs at least 2 evaluation paths");
    }
    if (p < 0 || p >= result.mean_lower.size()) {
        throw std::out_of_range("confidence_interval: position out of range");
    }
    const double q = normal_quantile(1.0 - alpha / 2.0);
    return {result.mean_lower(p) - q * result.se_lower(p), result.mean_upper(p) + q * result.se_upper(p)};
}

}  // namespace lsmc
