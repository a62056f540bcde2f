// Declarative regression bases and the design matrices they produce.
//
// Columns always come out in the same order:
//   1. transform block: for each component i (row of `flags`) and each
//      degree j = 1.. with flags[i][j-1] != 0, either z_i^j (power) or the
//      degree-j Laguerre polynomial of z_i (laguerre);
//   2. a constant 1 when `intercept` is set;
//   3. one linear spline max(z_i - B, 0) per knot B in knots[i], row-wise;
//   4. the n_custom columns returned by `custom`, appended on the right.
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lsmc {

enum class BasisType { Power, Laguerre };

// states [n x dim] -> [n x n_custom]. Must be pure and act row by row.
using CustomFeatures = std::function<Eigen::MatrixXd(const Eigen::MatrixXd& states)>;

struct BasisSpec {
    std::vector<std::vector<int>> flags;
    BasisType btype = BasisType::Power;
    bool intercept = false;
    std::vector<std::vector<double>> knots;
    CustomFeatures custom;
    int n_custom = 0;
    std::vector<std::string> custom_labels;
};

struct DesignMatrix {
    Eigen::MatrixXd data;
    std::vector<std::string> column_labels;
};

// Throws std::invalid_argument if the spec is inconsistent or empty, or if
// it references more components than `dim` (pass dim = 0 to skip that check).
void validate_basis(const BasisSpec& spec, std::size_t dim = 0);

std::size_t basis_dimension(const BasisSpec& spec);

// Unweighted Laguerre polynomial L_degree(x) via the three-term recurrence.
double laguerre(int degree, double x);

DesignMatrix build_design_matrix(const Eigen::MatrixXd& states, const BasisSpec& spec);

// Feature values only, without labels.
Eigen::MatrixXd design_values(const Eigen::MatrixXd& states, const BasisSpec& spec);

Eigen::VectorXd evaluate_basis_row(const Eigen::VectorXd& z, const BasisSpec& spec);

std::vector<std::string> basis_labels(const BasisSpec& spec);

}  // namespace lsmc
