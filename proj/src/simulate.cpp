#include "lsmc/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsmc/parallel.hpp"
#include "lsmc/rng.hpp"

namespace lsmc {

namespace {

// Outer paths use stream ids below this tag, nested columns at or above it.
constexpr std::uint64_t kNestedStreamTag = std::uint64_t{1} << 63;

void check_params(const GbmParams& params) {
    if (!(params.start > 0.0) || !std::isfinite(params.start)) {
        throw std::invalid_argument("GBM start must be positive and finite");
    }
    if (!(params.vol >= 0.0) || !std::isfinite(params.vol)) {
        throw std::invalid_argument("GBM vol must be nonnegative and finite");
    }
    if (!std::isfinite(params.drift)) throw std::invalid_argument("GBM drift must be finite");
}

}  // namespace

Eigen::MatrixXd PathPanel::states(std::size_t k) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n_path()), static_cast<Eigen::Index>(dim()));
    for (std::size_t i = 0; i < n_path(); ++i) {
        for (std::size_t j = 0; j < dim(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data_(i, j, k);
        }
    }
    return out;
}

PathPanel gbm_paths(const GbmParams& params, std::size_t n_dec, std::size_t n_path,
                    std::uint64_t seed, int threads) {
    check_params(params);
    if (n_path < 1) throw std::invalid_argument("n_path must be at least 1");
    if (n_dec < 1) throw std::invalid_argument("n_dec must be at least 1");
    if (params.antithetic && n_path % 2 != 0) {
        throw std::invalid_argument("antithetic sampling needs an even n_path, got " +
                                    std::to_string(n_path));
    }

    PathPanel panel(n_path, 1, n_dec);
    parallel_for(n_path, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const bool mirrored = params.antithetic && (i % 2 == 1);
            const std::uint64_t stream_id = params.antithetic ? i / 2 : i;
            NormalStream stream(seed, stream_id);
            double z = params.start;
            panel(i, 0, 0) = z;
            for (std::size_t k = 1; k < n_dec; ++k) {
                const double w = stream.normal();
                z = gbm_step(z, params.drift, params.vol, mirrored ? -w : w);
                panel(i, 0, k) = z;
            }
        }
    });
    return panel;
}

SubsimPanel nested_gbm(const PathPanel& paths, const GbmParams& params, std::size_t n_subsim,
                       std::uint64_t seed, int threads) {
    check_params(params);
    if (n_subsim < 1) throw std::invalid_argument("n_subsim must be at least 1");
    if (paths.n_path() < 1 || paths.n_dec() < 2 || paths.dim() < 1) {
        throw std::invalid_argument("nested simulation needs a panel with at least 2 epochs");
    }
    if (params.antithetic && n_subsim % 2 != 0) {
        throw std::invalid_argument("antithetic nested sampling needs an even n_subsim, got " +
                                    std::to_string(n_subsim));
    }

    const std::size_t n_path = paths.n_path();
    const std::size_t dim = paths.dim();
    const std::size_t n_step = paths.n_dec() - 1;
    const std::size_t n_fresh = params.antithetic ? n_subsim / 2 : n_subsim;
    SubsimPanel out(n_subsim, dim, n_path, n_step);

    // One stream per (path, epoch) column.
    parallel_for(n_path, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> draws(n_fresh * dim);
        for (std::size_t k = begin; k < end; ++k) {
            for (std::size_t l = 0; l < n_step; ++l) {
                NormalStream stream(seed, kNestedStreamTag | (k * n_step + l));
                for (double& w : draws) w = stream.normal();
                for (std::size_t s = 0; s < n_subsim; ++s) {
                    const bool mirrored = s >= n_fresh;
                    const std::size_t src = mirrored ? s - n_fresh : s;
                    for (std::size_t j = 0; j < dim; ++j) {
                        const double w = draws[src * dim + j];
                        out(s, j, k, l) =
                            gbm_step(paths(k, j, l), params.drift, params.vol, mirrored ? -w : w);
                    }
                }
            }
        }
    });
    return out;
}

}  // namespace lsmc
