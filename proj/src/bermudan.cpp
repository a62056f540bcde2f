#include "lsmc/bermudan.hpp"

#include <cmath>
#include <stdexcept>

namespace lsmc::bermudan {

MdpModel put_model(const PutParams& params) {
    if (!std::isfinite(params.strike) || !std::isfinite(params.rate_per_step)) {
        throw std::invalid_argument("Bermudan put parameters must be finite");
    }
    MdpModel model;
    model.n_pos = 2;
    model.n_action = 2;
    model.n_dec = params.n_dec;
    model.dim = 1;
    model.kernel = TransitionKernel::deterministic({{kExercised, kExercised}, {kUnexercised, kExercised}});

    const double strike = params.strike;
    const double kappa = params.rate_per_step;
    const int horizon = params.n_dec - 1;
    model.reward = [strike, kappa](const Eigen::MatrixXd& states, int t) {
        Cube out(static_cast<std::size_t>(states.rows()), 2, 2);
        const double discount = std::exp(-kappa * t);
        for (Eigen::Index i = 0; i < states.rows(); ++i) {
            out(static_cast<std::size_t>(i), kUnexercised, kExercise) =
                discount * std::max(strike - states(i, 0), 0.0);
        }
        return out;
    };
    model.scrap = [strike, kappa, horizon](const Eigen::MatrixXd& states) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(states.rows(), 2);
        const double discount = std::exp(-kappa * horizon);
        for (Eigen::Index i = 0; i < states.rows(); ++i) {
            out(i, kUnexercised) = discount * std::max(strike - states(i, 0), 0.0);
        }
        return out;
    };
    return model;
}

CustomFeatures reciprocal_feature() {
    return [](const Eigen::MatrixXd& states) -> Eigen::MatrixXd {
        return states.col(0).cwiseInverse();
    };
}

BasisSpec reference_basis() {
    BasisSpec spec;
    spec.flags = {{1, 1}};
    spec.btype = BasisType::Power;
    spec.intercept = true;
    spec.knots = {{30.0, 40.0, 50.0}};
    spec.custom = reciprocal_feature();
    spec.n_custom = 1;
    spec.custom_labels = {"1/z0"};
    return spec;
}

}  // namespace lsmc::bermudan
