#include "lsmc/basis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lsmc {

namespace {

std::size_t flagged_count(const BasisSpec& spec) {
    std::size_t count = 0;
    for (const auto& row : spec.flags) {
        for (int f : row) count += (f != 0);
    }
    return count;
}

std::size_t knot_count(const BasisSpec& spec) {
    std::size_t count = 0;
    for (const auto& row : spec.knots) count += row.size();
    return count;
}

double integer_power(double x, int degree) {
    double out = x;
    for (int d = 1; d < degree; ++d) out *= x;
    return out;
}

std::string format_number(double value) {
    std::ostringstream os;
    os << value;
    return os.str();
}

}  // namespace

void validate_basis(const BasisSpec& spec, std::size_t dim) {
    if (spec.n_custom < 0) throw std::invalid_argument("n_custom must be nonnegative");
    if ((spec.n_custom > 0) != static_cast<bool>(spec.custom)) {
        throw std::invalid_argument("n_custom must be positive exactly when custom features are set");
    }
    if (!spec.custom_labels.empty() &&
        spec.custom_labels.size() != static_cast<std::size_t>(spec.n_custom)) {
        throw std::invalid_argument("custom_labels must have n_custom entries");
    }
    if (dim > 0) {
        if (spec.flags.size() > dim) {
            throw std::invalid_argument("basis flags reference " + std::to_string(spec.flags.size()) +
                                        " components but the state has " + std::to_string(dim));
        }
        if (spec.knots.size() > dim) {
            throw std::invalid_argument("knots reference " + std::to_string(spec.knots.size()) +
                                        " components but the state has " + std::to_string(dim));
        }
    }
    for (const auto& row : spec.knots) {
        for (double b : row) {
            if (!std::isfinite(b)) throw std::invalid_argument("knot locations must be finite");
        }
    }
    if (basis_dimension(spec) < 1) {
        throw std::invalid_argument("basis is empty: supply flags, an intercept, knots or custom features");
    }
}

std::size_t basis_dimension(const BasisSpec& spec) {
    return flagged_count(spec) + (spec.intercept ? 1 : 0) + knot_count(spec) +
           static_cast<std::size_t>(std::max(spec.n_custom, 0));
}

double laguerre(int degree, double x) {
    if (degree < 0) throw std::invalid_argument("Laguerre degree must be nonnegative");
    double prev = 1.0;
    if (degree == 0) return prev;
    double curr = 1.0 - x;
    for (int k = 1; k < degree; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * curr - k * prev) / (k + 1.0);
        prev = curr;
        curr = next;
    }
    return curr;
}

std::vector<std::string> basis_labels(const BasisSpec& spec) {
    std::vector<std::string> labels;
    labels.reserve(basis_dimension(spec));
    for (std::size_t i = 0; i < spec.flags.size(); ++i) {
        for (std::size_t j = 0; j < spec.flags[i].size(); ++j) {
            if (spec.flags[i][j] == 0) continue;
            const std::string comp = "z" + std::to_string(i);
            const std::string degree = std::to_string(j + 1);
            labels.push_back(spec.btype == BasisType::Power ? comp + "^" + degree
                                                            : "L" + degree + "(" + comp + ")");
        }
    }
    if (spec.intercept) labels.emplace_back("1");
    for (std::size_t i = 0; i < spec.knots.size(); ++i) {
        for (double b : spec.knots[i]) {
            labels.push_back("max(z" + std::to_string(i) + "-" + format_number(b) + ",0)");
        }
    }
    for (int c = 0; c < spec.n_custom; ++c) {
        labels.push_back(spec.custom_labels.empty() ? "custom" + std::to_string(c)
                                                    : spec.custom_labels[static_cast<std::size_t>(c)]);
    }
    return labels;
}

Eigen::MatrixXd design_values(const Eigen::MatrixXd& states, const BasisSpec& spec) {
    validate_basis(spec, static_cast<std::size_t>(states.cols()));
    const Eigen::Index n = states.rows();
    const auto m = static_cast<Eigen::Index>(basis_dimension(spec));
    if (!states.allFinite()) throw std::invalid_argument("design matrix: states must be finite");

    Eigen::MatrixXd out(n, m);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < spec.flags.size(); ++i) {
        const auto comp = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < spec.flags[i].size(); ++j) {
            if (spec.flags[i][j] == 0) continue;
            const int degree = static_cast<int>(j) + 1;
            for (Eigen::Index r = 0; r < n; ++r) {
                const double z = states(r, comp);
                out(r, col) = spec.btype == BasisType::Power ? integer_power(z, degree)
                                                             : laguerre(degree, z);
            }
            ++col;
        }
    }
    if (spec.intercept) {
        out.col(col).setOnes();
        ++col;
    }
    for (std::size_t i = 0; i < spec.knots.size(); ++i) {
        const auto comp = static_cast<Eigen::Index>(i);
        for (double b : spec.knots[i]) {
            for (Eigen::Index r = 0; r < n; ++r) out(r, col) = std::max(states(r, comp) - b, 0.0);
            ++col;
        }
    }
    if (spec.n_custom > 0) {
        const Eigen::MatrixXd extra = spec.custom(states);
        if (extra.rows() != n || extra.cols() != spec.n_custom) {
            throw std::invalid_argument("custom features returned " + std::to_string(extra.rows()) +
                                        "x" + std::to_string(extra.cols()) + ", expected " +
                                        std::to_string(n) + "x" + std::to_string(spec.n_custom));
        }
        out.rightCols(spec.n_custom) = extra;
    }
    if (!out.allFinite()) throw std::domain_error("design matrix has non-finite feature values");
    return out;
}

DesignMatrix build_design_matrix(const Eigen::MatrixXd& states, const BasisSpec& spec) {
    return {design_values(states, spec), basis_labels(spec)};
}

Eigen::VectorXd evaluate_basis_row(const Eigen::VectorXd& z, const BasisSpec& spec) {
    const Eigen::MatrixXd row = z.transpose();
    return design_values(row, spec).row(0).transpose();
}

}  // namespace lsmc
