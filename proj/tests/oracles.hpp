// Independent reference computations used only by tests.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "lsmc/bermudan.hpp"
#include "lsmc/dual.hpp"
#include "lsmc/simulate.hpp"

namespace oracle {

// Cox-Ross-Rubinstein tree for an American put.
inline double crr_american_put(double spot, double strike, double rate, double sigma, double maturity,
                               int steps) {
    const double dt = maturity / steps;
    const double up = std::exp(sigma * std::sqrt(dt));
    const double down = 1.0 / up;
    const double prob = (std::exp(rate * dt) - down) / (up - down);
    const double disc = std::exp(-rate * dt);
    std::vector<double> v(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        v[static_cast<std::size_t>(j)] =
            std::max(strike - spot * std::pow(up, steps - j) * std::pow(down, j), 0.0);
    }
    for (int i = steps - 1; i >= 0; --i) {
        for (int j = 0; j <= i; ++j) {
            const double s = spot * std::pow(up, i - j) * std::pow(down, j);
            const double cont = disc * (prob * v[static_cast<std::size_t>(j)] +
                                        (1.0 - prob) * v[static_cast<std::size_t>(j) + 1]);
            v[static_cast<std::size_t>(j)] = std::max(cont, strike - s);
        }
    }
    return v[0];
}

// Laguerre polynomial from its explicit sum: sum_k C(n,k) (-x)^k / k!.
inline double laguerre_closed_form(int n, double x) {
    double total = 0.0;
    double binom = 1.0;
    double fact = 1.0;
    double power = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            binom *= static_cast<double>(n - k + 1) / k;
            fact *= k;
            power *= -x;
        }
        total += binom * power / fact;
    }
    return total;
}

// Minimum-norm least squares via complete orthogonal decomposition.
inline Eigen::VectorXd min_norm_solution(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    return cod.solve(y);
}

// Finite lattice toy: Z in {0..4}, Z_{t+1} = clamp(Z_t +- 1) with prob 1/2,
// Bermudan put payoff with strike 3 and per-step rate 0.1.
struct LatticeToy {
    static constexpr int kStates = 5;
    static constexpr int kStart = 2;
    static constexpr int kNDec = 4;
    static constexpr double kStrike = 3.0;
    static constexpr double kRate = 0.1;

    static int up(int z) { return std::min(z + 1, kStates - 1); }
    static int down(int z) { return std::max(z - 1, 0); }

    static double payoff(int t, int z) { return std::exp(-kRate * t) * std::max(kStrike - z, 0.0); }

    // values[t][z][p] for t = 0..T by exhaustive backward enumeration.
    static std::vector<std::array<std::array<double, 2>, kStates>> exact_values() {
        std::vector<std::array<std::array<double, 2>, kStates>> v(kNDec);
        const int T = kNDec - 1;
        for (int z = 0; z < kStates; ++z) v[T][z] = {0.0, payoff(T, z)};
        for (int t = T - 1; t >= 0; --t) {
            for (int z = 0; z < kStates; ++z) {
                const double cont = 0.5 * (v[t + 1][up(z)][1] + v[t + 1][down(z)][1]);
                v[t][z] = {0.0, std::max(payoff(t, z), cont)};
            }
        }
        return v;
    }

    // Every shock sequence once: 2^(n_dec-1) equally likely paths.
    static lsmc::PathPanel enumerated_paths() {
        const std::size_t n_step = kNDec - 1;
        const std::size_t n_path = std::size_t{1} << n_step;
        lsmc::PathPanel panel(n_path, 1, kNDec);
        for (std::size_t i = 0; i < n_path; ++i) {
            int z = kStart;
            panel(i, 0, 0) = z;
            for (std::size_t k = 0; k < n_step; ++k) {
                z = ((i >> k) & 1U) ? up(z) : down(z);
                panel(i, 0, k + 1) = z;
            }
        }
        return panel;
    }

    // Nested panel holding both successors (s = 0 up, s = 1 down).
    static lsmc::SubsimPanel both_successors(const lsmc::PathPanel& paths) {
        lsmc::SubsimPanel sub(2, 1, paths.n_path(), paths.n_dec() - 1);
        for (std::size_t k = 0; k < paths.n_path(); ++k) {
            for (std::size_t l = 0; l + 1 < paths.n_dec(); ++l) {
                const int z = static_cast<int>(paths(k, 0, l));
                sub(0, 0, k, l) = up(z);
                sub(1, 0, k, l) = down(z);
            }
        }
        return sub;
    }

    static lsmc::MdpModel model() { return lsmc::bermudan::put_model({kStrike, kRate, kNDec}); }

    // One indicator column per lattice point.
    static lsmc::BasisSpec indicator_basis() {
        lsmc::BasisSpec spec;
        spec.n_custom = kStates;
        spec.custom = [](const Eigen::MatrixXd& states) -> Eigen::MatrixXd {
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(states.rows(), kStates);
            for (Eigen::Index i = 0; i < states.rows(); ++i) {
                out(i, static_cast<Eigen::Index>(std::lround(states(i, 0)))) = 1.0;
            }
            return out;
        };
        return spec;
    }

    // Exact martingale increments from exact values and exact expectations.
    static lsmc::MartIncrements exact_increments(const lsmc::PathPanel& paths) {
        const auto v = exact_values();
        lsmc::MartIncrements delta(paths.n_path(), paths.n_dec() - 1, 2);
        for (std::size_t i = 0; i < paths.n_path(); ++i) {
            for (std::size_t t = 0; t + 1 < paths.n_dec(); ++t) {
                const int z = static_cast<int>(paths(i, 0, t));
                const int next = static_cast<int>(paths(i, 0, t + 1));
                for (std::size_t q = 0; q < 2; ++q) {
                    const double expected = 0.5 * (v[t + 1][up(z)][q] + v[t + 1][down(z)][q]);
                    delta(i, t, q) = expected - v[t + 1][next][q];
                }
            }
        }
        return delta;
    }
};

}  // namespace oracle
