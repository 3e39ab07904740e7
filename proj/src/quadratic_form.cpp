#include "qfboot/quadratic_form.hpp"

#include "qfboot/errors.hpp"

#include <string>

namespace qfboot {

double quadratic_form_stat(const Sample& sample) {
    const double n = static_cast<double>(sample.n());
    const Eigen::VectorXd mean = sample.values().colwise().sum().transpose() / n;
    return n * mean.squaredNorm();
}

double weighted_quadratic_form_stat(const Sample& sample, std::span<const double> w) {
    if (w.size() != sample.n()) {
        throw DimensionError("weight length " + std::to_string(w.size()) + " does not match n = " +
                             std::to_string(sample.n()));
    }
    const Eigen::Map<const Eigen::VectorXd> weights(w.data(), static_cast<Eigen::Index>(w.size()));
    const double n = static_cast<double>(sample.n());
    // n * ||n^{-1} Z^T w||^2 = ||Z^T w||^2 / n
    return (sample.values().transpose() * weights).squaredNorm() / n;
}

SymMatrix sample_second_moment(const Sample& sample) {
    const Eigen::MatrixXd& z = sample.values();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(z.cols(), z.cols());
    m.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / static_cast<double>(sample.n()));
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    return SymMatrix(m);
}

double max_cov_discrepancy(const Sample& sample, const SymMatrix& target) {
    if (target.dim() != sample.d()) {
        throw DimensionError("target is " + std::to_string(target.dim()) + "x" + std::to_string(target.dim()) +
                             " but sample has d = " + std::to_string(sample.d()));
    }
    return (sample_second_moment(sample).matrix() - target.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace qfboot
