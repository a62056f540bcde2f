// Finite-horizon MDP with a controlled discrete position and an uncontrolled
// continuous state.
//
// Positions and actions are 0-based indices. Time runs over decision epochs
// t = 0, ..., T with n_dec = T + 1. Discounting, if any, lives inside the
// reward and scrap values.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lsmc/tensor.hpp"

namespace lsmc {

// Batch reward: states [n x dim], epoch t -> [n x n_pos x n_action].
// Must be side-effect free; it is called concurrently.
using RewardFn = std::function<Cube(const Eigen::MatrixXd& states, int t)>;
// Batch scrap: states [n x dim] -> [n x n_pos].
using ScrapFn = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& states)>;

class TransitionKernel {
public:
    // control[p][a] is the position reached from p under action a.
    static TransitionKernel deterministic(std::vector<std::vector<int>> control);
    // alpha[p][a][p2] is the probability of moving from p to p2 under a.
    static TransitionKernel stochastic(std::vector<std::vector<std::vector<double>>> alpha);

    bool is_deterministic() const { return std::holds_alternative<Control>(kernel_); }
    std::size_t n_pos() const { return n_pos_; }
    std::size_t n_action() const { return n_action_; }

    // Successor under a deterministic kernel; only valid when is_deterministic().
    int successor(int p, int a) const {
        return std::get<Control>(kernel_).next[static_cast<std::size_t>(p) * n_action_ +
                                               static_cast<std::size_t>(a)];
    }
    // Row alpha[p][a][.] of a stochastic kernel.
    std::span<const double> probabilities(int p, int a) const {
        const auto& alpha = std::get<Probabilities>(kernel_).alpha;
        return {alpha.data() + (static_cast<std::size_t>(p) * n_action_ +
                                static_cast<std::size_t>(a)) * n_pos_,
                n_pos_};
    }

    // Non-empty when the constructor input was ragged.
    const std::string& shape_error() const { return shape_error_; }

    const std::vector<int>& control_entries() const { return std::get<Control>(kernel_).next; }
    const std::vector<double>& probability_entries() const {
        return std::get<Probabilities>(kernel_).alpha;
    }

private:
    struct Control {
        std::vector<int> next;
    };
    struct Probabilities {
        std::vector<double> alpha;
    };

    std::variant<Control, Probabilities> kernel_;
    std::size_t n_pos_ = 0;
    std::size_t n_action_ = 0;
    std::string shape_error_;
};

struct MdpModel {
    int n_pos = 1;
    int n_action = 1;
    int n_dec = 2;
    int dim = 1;
    TransitionKernel kernel;
    RewardFn reward;
    ScrapFn scrap;

    int horizon() const { return n_dec - 1; }
};

struct ValidationReport {
    bool ok = true;
    std::string message;

    explicit operator bool() const { return ok; }
};

ValidationReport validate_model(const MdpModel& model);

// Throws std::invalid_argument carrying the report message if invalid.
void require_valid(const MdpModel& model);

// alpha^a_{p,p2}.
double transition_prob(const MdpModel& model, int p, int a, int p2);

// sum_{p2} alpha^a_{p,p2} * values[p2]. A deterministic kernel returns the
// successor's entry exactly.
double successor_mix(const MdpModel& model, int p, int a, std::span<const double> values);

// Unchecked hot-loop variant of successor_mix.
inline double mix_unchecked(const TransitionKernel& kernel, int p, int a,
                            std::span<const double> values) {
    if (kernel.is_deterministic()) {
        return values[static_cast<std::size_t>(kernel.successor(p, a))];
    }
    const auto row = kernel.probabilities(p, a);
    double acc = 0.0;
    for (std::size_t q = 0; q < row.size(); ++q) acc += row[q] * values[q];
    return acc;
}

// Calls model.reward / model.scrap and checks shape and finiteness.
Cube evaluate_reward(const MdpModel& model, const Eigen::MatrixXd& states, int t);
Eigen::MatrixXd evaluate_scrap(const MdpModel& model, const Eigen::MatrixXd& states);

}  // namespace lsmc
