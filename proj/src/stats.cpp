#include "lsmc/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace lsmc {

MeanSe mean_and_se(const Eigen::Ref<const Eigen::VectorXd>& sample) {
    const Eigen::Index n = sample.size();
    if (n == 0) throw std::invalid_argument("mean of an empty sample");
    // Shifted by the first draw so a constant sample has exactly zero spread.
    const double shift = sample(0);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += sample(i) - shift;
    const double offset = sum / static_cast<double>(n);
    MeanSe out;
    out.mean = shift + offset;
    if (n > 1) {
        double ss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = sample(i) - shift - offset;
            ss += d * d;
        }
        out.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return out;
}

double normal_quantile(double probability) {
    if (!(probability > 0.0 && probability < 1.0)) {
        throw std::invalid_argument("normal quantile needs a probability in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), probability);
}

}  // namespace lsmc
