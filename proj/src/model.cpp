#include "lsmc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lsmc {

TransitionKernel TransitionKernel::deterministic(std::vector<std::vector<int>> control) {
    TransitionKernel k;
    k.n_pos_ = control.size();
    k.n_action_ = control.empty() ? 0 : control.front().size();
    Control c;
    c.next.reserve(k.n_pos_ * k.n_action_);
    for (std::size_t p = 0; p < control.size(); ++p) {
        if (control[p].size() != k.n_action_) {
            k.shape_error_ = "control matrix row " + std::to_string(p) + " has " +
                             std::to_string(control[p].size()) + " entries, expected " +
                             std::to_string(k.n_action_);
            c.next.assign(k.n_pos_ * k.n_action_, 0);
            break;
        }
        c.next.insert(c.next.end(), control[p].begin(), control[p].end());
    }
    k.kernel_ = std::move(c);
    return k;
}

TransitionKernel TransitionKernel::stochastic(std::vector<std::vector<std::vector<double>>> alpha) {
    TransitionKernel k;
    k.n_pos_ = alpha.size();
    k.n_action_ = alpha.empty() ? 0 : alpha.front().size();
    Probabilities prob;
    prob.alpha.reserve(k.n_pos_ * k.n_action_ * k.n_pos_);
    for (std::size_t p = 0; p < alpha.size() && k.shape_error_.empty(); ++p) {
        if (alpha[p].size() != k.n_action_) {
            k.shape_error_ = "transition tensor slice " + std::to_string(p) + " has " +
                             std::to_string(alpha[p].size()) + " actions, expected " +
                             std::to_string(k.n_action_);
            break;
        }
        for (std::size_t a = 0; a < alpha[p].size(); ++a) {
            if (alpha[p][a].size() != k.n_pos_) {
                k.shape_error_ = "transition row (" + std::to_string(p) + "," + std::to_string(a) +
                                 ") has " + std::to_string(alpha[p][a].size()) +
                                 " entries, expected " + std::to_string(k.n_pos_);
                break;
            }
            prob.alpha.insert(prob.alpha.end(), alpha[p][a].begin(), alpha[p][a].end());
        }
    }
    if (!k.shape_error_.empty()) prob.alpha.assign(k.n_pos_ * k.n_action_ * k.n_pos_, 0.0);
    k.kernel_ = std::move(prob);
    return k;
}

namespace {

ValidationReport fail(std::string message) { return {false, std::move(message)}; }

}  // namespace

ValidationReport validate_model(const MdpModel& model) {
    if (model.n_pos < 1) return fail("n_pos must be at least 1");
    if (model.n_action < 1) return fail("n_action must be at least 1");
    if (model.n_dec < 2) return fail("n_dec must be at least 2");
    if (model.dim < 1) return fail("dim must be at least 1");

    const auto& k = model.kernel;
    if (!k.shape_error().empty()) return fail(k.shape_error());
    if (k.n_pos() != static_cast<std::size_t>(model.n_pos) ||
        k.n_action() != static_cast<std::size_t>(model.n_action)) {
        return fail("kernel dimensions (" + std::to_string(k.n_pos()) + " positions, " +
                    std::to_string(k.n_action()) + " actions) do not match model (" +
                    std::to_string(model.n_pos) + ", " + std::to_string(model.n_action) + ")");
    }

    if (k.is_deterministic()) {
        const auto& next = k.control_entries();
        for (std::size_t idx = 0; idx < next.size(); ++idx) {
            if (next[idx] < 0 || next[idx] >= model.n_pos) {
                return fail("control entry (" + std::to_string(idx / k.n_action()) + "," +
                            std::to_string(idx % k.n_action()) + ") = " +
                            std::to_string(next[idx]) + " is not a valid position index");
            }
        }
    } else {
        for (int p = 0; p < model.n_pos; ++p) {
            for (int a = 0; a < model.n_action; ++a) {
                double sum = 0.0;
                for (double prob : k.probabilities(p, a)) {
                    if (!(prob >= 0.0 && prob <= 1.0)) {
                        return fail("transition probability outside [0,1] in row (" +
                                    std::to_string(p) + "," + std::to_string(a) + ")");
                    }
                    sum += prob;
                }
                if (std::abs(sum - 1.0) > 1e-12) {
                    return fail("row sum != 1 for (p=" + std::to_string(p) + ", a=" +
                                std::to_string(a) + "): " + std::to_string(sum));
                }
            }
        }
    }

    if (!model.reward) return fail("reward function is not set");
    if (!model.scrap) return fail("scrap function is not set");
    return {};
}

void require_valid(const MdpModel& model) {
    if (auto report = validate_model(model); !report) {
        throw std::invalid_argument("invalid model: " + report.message);
    }
}

namespace {

void check_index(int value, int bound, const char* what) {
    if (value < 0 || value >= bound) {
        throw std::out_of_range(std::string(what) + " index " + std::to_string(value) +
                                " out of range [0, " + std::to_string(bound) + ")");
    }
}

}  // namespace

double transition_prob(const MdpModel& model, int p, int a, int p2) {
    check_index(p, model.n_pos, "position");
    check_index(a, model.n_action, "action");
    check_index(p2, model.n_pos, "position");
    if (model.kernel.is_deterministic()) {
        return model.kernel.successor(p, a) == p2 ? 1.0 : 0.0;
    }
    return model.kernel.probabilities(p, a)[static_cast<std::size_t>(p2)];
}

double successor_mix(const MdpModel& model, int p, int a, std::span<const double> values) {
    check_index(p, model.n_pos, "position");
    check_index(a, model.n_action, "action");
    if (values.size() != static_cast<std::size_t>(model.n_pos)) {
        throw std::out_of_range("successor_mix: expected " + std::to_string(model.n_pos) +
                                " values, got " + std::to_string(values.size()));
    }
    return mix_unchecked(model.kernel, p, a, values);
}

Cube evaluate_reward(const MdpModel& model, const Eigen::MatrixXd& states, int t) {
    Cube out = model.reward(states, t);
    if (out.dim(0) != static_cast<std::size_t>(states.rows()) ||
        out.dim(1) != static_cast<std::size_t>(model.n_pos) ||
        out.dim(2) != static_cast<std::size_t>(model.n_action)) {
        throw std::invalid_argument("reward returned shape [" + std::to_string(out.dim(0)) + " x " +
                                    std::to_string(out.dim(1)) + " x " + std::to_string(out.dim(2)) +
                                    "], expected [" + std::to_string(states.rows()) + " x " +
                                    std::to_string(model.n_pos) + " x " +
                                    std::to_string(model.n_action) + "]");
    }
    for (double v : out.values()) {
        if (!std::isfinite(v)) throw std::domain_error("reward returned a non-finite value at t=" + std::to_string(t));
    }
    return out;
}

Eigen::MatrixXd evaluate_scrap(const MdpModel& model, const Eigen::MatrixXd& states) {
    Eigen::MatrixXd out = model.scrap(states);
    if (out.rows() != states.rows() || out.cols() != model.n_pos) {
        throw std::invalid_argument("scrap returned shape [" + std::to_string(out.rows()) + " x " +
                                    std::to_string(out.cols()) + "], expected [" +
                                    std::to_string(states.rows()) + " x " +
                                    std::to_string(model.n_pos) + "]");
    }
    if (!out.allFinite()) throw std::domain_error("scrap returned a non-finite value");
    return out;
}

}  // namespace lsmc
