#pragma once

#include <Eigen/Dense>

namespace lsmc {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // sample sd (n - 1 denominator) / sqrt(n); 0 when n < 2
};

// Sums in index order.
MeanSe mean_and_se(const Eigen::Ref<const Eigen::VectorXd>& sample);

// Inverse of the standard normal CDF.
double normal_quantile(double probability);

}  // namespace lsmc
