#pragma once

#include "qfboot/linalg.hpp"
#include "qfboot/rng.hpp"
#include "qfboot/sample.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <vector>

namespace qfboot {

/// Threshold t, ramp width delta > 0 and Gaussian bandwidth h > 0 of the
/// smoothed indicator of {u >= t}.
struct SmoothIndicatorParams {
    double t;
    double delta;
    double h;

    SmoothIndicatorParams(double t_, double delta_, double h_);
};

/// 0 for u <= t - delta, 1 for u >= t, linear in between.
[[nodiscard]] double ramp_indicator(double u, double t, double delta);

/// E[ramp_indicator(u + h Z)] for Z ~ N(0,1), evaluated in closed form.
[[nodiscard]] double smooth_indicator(double u, const SmoothIndicatorParams& params);

/// Largest bandwidth with Phi(-delta / h) <= eps: delta / Phi^{-1}(1 - eps).
[[nodiscard]] double h_bound(double delta, double eps);

/// Plug-in growth-rate ratios of the moment conditions on Z.
struct AssumptionReport {
    std::size_t n = 0;
    std::size_t d = 0;
    double gamma = 0.0;
    double kappa = 0.0;
    /// d (E||Z||_2^3)^2 / n, E||Z||_2^4 / n, d^4 / n
    std::array<double, 3> ratio_i{};
    /// d^{2+gamma} / n^gamma * E||Z||_2^{4+2gamma}
    double ratio_ii = 0.0;
    /// (log d)^{kappa/2} d^{2+kappa} / n^{1+kappa/2} * E||Z||_{2+kappa}^{2(2+kappa)}
    double ratio_iii = 0.0;
    double eig_min = 0.0;
    double eig_max = 0.0;
};

[[nodiscard]] AssumptionReport assumption_report(const Sample& sample, double gamma, double kappa);

/// Replicated draws of the rows (X_1, ..., X_n) of one side of a Lindeberg
/// swap. Every replicate is an n x d matrix; expectations are averages over
/// replicates.
struct RowDraws {
    std::vector<Eigen::MatrixXd> replicates;

    [[nodiscard]] std::size_t count() const noexcept { return replicates.size(); }
};

struct LindebergTerms {
    double s1_bound = 0.0;
    double s2_bound = 0.0;
    /// Unscaled remainder sum; the universal constant is not included.
    double r_bound = 0.0;
    /// s1 + s2 + L2 (L3 / L2)^q r
    double total = 0.0;
};

/// Plug-in evaluation of the S1, S2 and R upper bounds for swapping the
/// summands A_i for B_i one at a time. Replicate r of A is paired with
/// replicate r of B when forming the partial sums S_{i:n}.
[[nodiscard]] LindebergTerms lindeberg_terms(const RowDraws& a, const RowDraws& b, double l2, double l3, double q);

/// sup over windows of P(| ||N(0, Sigma)||^2 - t | <= gamma sqrt(tr Sigma^2)),
/// estimated from `draws` samples with window centers at every 200th order
/// statistic.
[[nodiscard]] double anticoncentration_estimate(const SymMatrix& sigma, double gamma, std::size_t draws,
                                                const RngState& rng, std::size_t threads = 1);

}  // namespace qfboot
