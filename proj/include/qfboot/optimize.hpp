#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace qfboot {

struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    [[nodiscard]] Eigen::Index dim() const noexcept { return lower.size(); }
    [[nodiscard]] Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
    [[nodiscard]] Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
};

struct OptimizerOptions {
    double x_tol = 1e-12;            ///< relative to the box width
    double f_tol = 1e-15;            ///< relative spread of simplex values
    std::size_t max_iterations = 5000;
    std::size_t restarts = 5;        ///< Nelder-Mead starting points
    std::size_t grid_points = 41;    ///< scalar pre-scan resolution
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

/// Grid scan followed by golden-section refinement around the best grid point.
/// Non-finite objective values count as +infinity.
[[nodiscard]] MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                                             const OptimizerOptions& options = {});

/// Nelder-Mead with vertices clamped to the box, restarted from the box
/// center and `restarts - 1` deterministic jittered points; the best run wins.
[[nodiscard]] MinimizeResult nelder_mead_box(const ObjectiveFn& f, const Box& box,
                                             const OptimizerOptions& options = {});

/// Dispatches to minimize_scalar for one-dimensional boxes.
[[nodiscard]] MinimizeResult minimize_box(const ObjectiveFn& f, const Box& box, const OptimizerOptions& options = {});

}  // namespace qfboot
