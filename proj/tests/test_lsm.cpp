#include "doctest.h"

#include <cmath>

#include "lsmc/bermudan.hpp"
#include "lsmc/dual.hpp"
#include "lsmc/lsm.hpp"
#include "oracles.hpp"

using namespace lsmc;

namespace {

constexpr double kStep = 0.02;
constexpr double kKappa = 0.06 * kStep;
const double kVol = 0.2 * std::sqrt(kStep);

MdpModel reference_model() { return bermudan::put_model({40.0, kKappa, 51}); }

const PathPanel& reference_panel() {
    static const PathPanel panel = gbm_paths({36.0, kKappa, kVol, true}, 51, 10000, 123);
    return panel;
}

const LsmResult& reference_lsm() {
    static const LsmResult result = run_lsm(reference_panel(), reference_model(), bermudan::reference_basis());
    return result;
}

MdpModel scaled(MdpModel model, double lambda) {
    auto reward = model.reward;
    auto scrap = model.scrap;
    model.reward = [reward, lambda](const Eigen::MatrixXd& s, int t) {
        Cube c = reward(s, t);
        for (double& v : c.values()) v *= lambda;
        return c;
    };
    model.scrap = [scrap, lambda](const Eigen::MatrixXd& s) { return (lambda * scrap(s)).eval(); };
    return model;
}

}  // namespace

TEST_CASE("reference Bermudan put value") {
    const LsmResult& r = reference_lsm();
    CHECK(r.value_estimate(bermudan::kUnexercised) >= 4.43);
    CHECK(r.value_estimate(bermudan::kUnexercised) <= 4.53);
    CHECK(r.value_estimate(bermudan::kExercised) == 0.0);
    MESSAGE("LSM value " << r.value_estimate(bermudan::kUnexercised) << " se "
                         << r.std_error(bermudan::kUnexercised));

    // value_estimate is exactly the column mean.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < r.path_values.rows(); ++i) sum += r.path_values(i, 1);
    CHECK(r.value_estimate(1) == sum / static_cast<double>(r.path_values.rows()));
}

TEST_CASE("waiting to maturity cannot beat the fitted policy beyond noise") {
    const LsmResult& r = reference_lsm();
    const PathPanel& panel = reference_panel();
    Eigen::VectorXd wait(static_cast<Eigen::Index>(panel.n_path()));
    for (std::size_t i = 0; i < panel.n_path(); ++i) {
        wait(static_cast<Eigen::Index>(i)) = std::exp(-kKappa * 50) * std::max(40.0 - panel(i, 0, 50), 0.0);
    }
    const double mean = wait.mean();
    const double se = std::sqrt((wait.array() - mean).square().sum() / (wait.size() - 1) / wait.size());
    CHECK(r.value_estimate(1) >= mean - 3 * se);
}

TEST_CASE("zero rewards give zero values and coefficients") {
    MdpModel model = reference_model();
    model.reward = [](const Eigen::MatrixXd& s, int) { return Cube(static_cast<std::size_t>(s.rows()), 2, 2); };
    model.scrap = [](const Eigen::MatrixXd& s) { return Eigen::MatrixXd::Zero(s.rows(), 2).eval(); };
    BasisSpec spec;
    spec.intercept = true;
    const PathPanel panel = gbm_paths({36.0, kKappa, kVol, false}, 51, 200, 1);
    const LsmResult r = run_lsm(panel, model, spec);
    for (double c : r.fit.data().values()) CHECK(c == 0.0);
    CHECK(r.path_values.isZero(0.0));
}

TEST_CASE("saturating basis reproduces the exact Bellman value on the lattice toy") {
    using Toy = oracle::LatticeToy;
    const auto exact = Toy::exact_values();
    const LsmResult r = run_lsm(Toy::enumerated_paths(), Toy::model(), Toy::indicator_basis());
    CHECK(std::abs(r.value_estimate(1) - exact[0][Toy::kStart][1]) <= 1e-10);
    CHECK(r.value_estimate(0) == 0.0);
    // The fit reproduces exact conditional expectations at every visited node.
    const MdpModel model = Toy::model();
    const PathPanel paths = Toy::enumerated_paths();
    for (int t = 1; t < Toy::kNDec; ++t) {
        for (int z = 0; z < Toy::kStates; ++z) {
            bool visited = false;
            for (std::size_t i = 0; i < paths.n_path(); ++i)
                visited = visited || paths(i, 0, static_cast<std::size_t>(t)) == z;
            if (!visited) continue;
            Eigen::VectorXd state(1);
            state << z;
            CHECK(std::abs(fitted_value(r.fit, model, Toy::indicator_basis(), t, 1, state) - exact[t][z][1]) <= 1e-10);
        }
    }
}

TEST_CASE("fitted_value and fitted_policy_at") {
    const MdpModel model = reference_model();
    const BasisSpec spec = bermudan::reference_basis();
    const ContinuationFit zero(51, 2, 7);
    Eigen::VectorXd z(1);

    z << 33.0;
    CHECK(fitted_value(zero, model, spec, 50, 1, z) == std::exp(-kKappa * 50) * 7.0);
    CHECK(fitted_value(zero, model, spec, 10, 1, z) == std::exp(-kKappa * 10) * 7.0);
    CHECK(fitted_policy_at(zero, model, spec, 10, 1, z) == bermudan::kExercise);

    z << 45.0;
    CHECK(fitted_value(zero, model, spec, 10, 1, z) == 0.0);
    CHECK(fitted_policy_at(zero, model, spec, 10, 1, z) == bermudan::kHold);

    z << 20.0;
    const LsmResult& r = reference_lsm();
    CHECK(fitted_value(r.fit, model, spec, 49, 1, z) >= std::exp(-kKappa * 49) * 20.0);

    z << 80.0;
    CHECK(fitted_policy_at(r.fit, model, spec, 49, 1, z) == bermudan::kHold);

    CHECK_THROWS_AS(fitted_value(zero, model, spec, 0, 1, z), std::out_of_range);
    CHECK_THROWS_AS(fitted_value(zero, model, spec, 51, 1, z), std::out_of_range);
    CHECK_THROWS_AS(fitted_policy_at(zero, model, spec, 50, 1, z), std::out_of_range);
    CHECK_THROWS_AS(fitted_policy_at(ContinuationFit(51, 2, 3), model, spec, 3, 1, z), std::invalid_argument);
}

TEST_CASE("argmax prefers the larger reward and breaks ties low") {
    MdpModel model;
    model.n_pos = 1;
    model.n_action = 2;
    model.n_dec = 2;
    model.dim = 1;
    model.kernel = TransitionKernel::deterministic({{0, 0}});
    double second = 3.0;
    model.reward = [&second](const Eigen::MatrixXd& s, int) {
        Cube c(static_cast<std::size_t>(s.rows()), 1, 2);
        for (std::size_t i = 0; i < c.dim(0); ++i) {
            c(i, 0, 0) = 1.0;
            c(i, 0, 1) = second;
        }
        return c;
    };
    model.scrap = [](const Eigen::MatrixXd& s) { return Eigen::MatrixXd::Zero(s.rows(), 1).eval(); };
    BasisSpec spec;
    spec.intercept = true;
    const ContinuationFit zero(2, 1, 1);
    Eigen::VectorXd z(1);
    z << 1.0;
    CHECK(fitted_policy_at(zero, model, spec, 0, 0, z) == 1);
    second = 1.0;
    CHECK(fitted_policy_at(zero, model, spec, 0, 0, z) == 0);
}

TEST_CASE("realized values replay from the fitted policy") {
    // Re-walk the training panel with the stored fit and zero penalties: the
    // policy value must reproduce every rolled-back path value.
    const LsmResult& r = reference_lsm();
    const MdpModel model = reference_model();
    const PathPanel& panel = reference_panel();
    const PolicyTable policy = path_policy(panel, r.fit, model, bermudan::reference_basis());
    const BoundResult replay = bounds(panel, model, MartIncrements(panel.n_path(), 50, 2), policy);
    for (Eigen::Index i = 0; i < r.path_values.rows(); ++i) {
        for (int p = 0; p < 2; ++p) CHECK(std::abs(replay.lower(i, p) - r.path_values(i, p)) <= 1e-12);
        CHECK(policy(static_cast<std::size_t>(i), 0, 1) == r.policy_at_0(i, 1));
    }
}

TEST_CASE("argmax is invariant under positive rescaling") {
    const PathPanel panel = gbm_paths({36.0, kKappa, kVol, true}, 51, 2000, 17);
    const BasisSpec spec = bermudan::reference_basis();
    const MdpModel model = reference_model();
    const LsmResult base = run_lsm(panel, model, spec);
    const MdpModel big = scaled(model, 4.0);
    const LsmResult scaled_run = run_lsm(panel, big, spec);
    CHECK(base.policy_at_0 == scaled_run.policy_at_0);
    CHECK(path_policy(panel, base.fit, model, spec) == path_policy(panel, scaled_run.fit, big, spec));
    CHECK(scaled_run.value_estimate(1) == doctest::Approx(4.0 * base.value_estimate(1)).epsilon(1e-12));
}

TEST_CASE("thread count and kernel encoding do not change results") {
    const PathPanel panel = gbm_paths({36.0, kKappa, kVol, true}, 51, 3000, 8);
    const BasisSpec spec = bermudan::reference_basis();
    MdpModel model = reference_model();
    const LsmResult one = run_lsm(panel, model, spec, Regressor::svd(), 1);
    const LsmResult four = run_lsm(panel, model, spec, Regressor::svd(), 4);
    CHECK(one.fit == four.fit);
    CHECK(one.path_values == four.path_values);

    model.kernel = TransitionKernel::stochastic({{{1.0, 0.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 0.0}}});
    const LsmResult onehot = run_lsm(panel, model, spec);
    CHECK(onehot.fit == one.fit);
    CHECK(onehot.path_values == one.path_values);
}

TEST_CASE("run_lsm rejects mismatched inputs") {
    const PathPanel panel = gbm_paths({36.0, kKappa, kVol, false}, 10, 20, 1);
    CHECK_THROWS_AS(run_lsm(panel, reference_model(), bermudan::reference_basis()), std::invalid_argument);
    MdpModel model = bermudan::put_model({40.0, kKappa, 10});
    model.scrap = [](const Eigen::MatrixXd& s) { return Eigen::MatrixXd::Zero(s.rows(), 3).eval(); };
    CHECK_THROWS_AS(run_lsm(panel, model, bermudan::reference_basis()), std::invalid_argument);
    const RegressorFn short_output = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, int) {
        return Eigen::VectorXd::Zero(1).eval();
    };
    CHECK_THROWS_AS(run_lsm(panel, bermudan::put_model({40.0, kKappa, 10}), bermudan::reference_basis(),
                            Regressor::custom(short_output)),
                    std::invalid_argument);
}
