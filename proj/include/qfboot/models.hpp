#pragma once

#include "qfboot/gmm_gel.hpp"
#include "qfboot/rng.hpp"
#include "qfboot/sample.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace qfboot {

/// Dynamic panel moments on rows (y_1, ..., y_T):
/// ((y_t - y_{t-1}) - theta (y_{t-1} - y_{t-2})) y_{t-s}, t = 3..T, s = 2..t-1.
/// q = 1, d = (T-2)(T-1)/2, theta in [-1, 1].
[[nodiscard]] MomentModel panel_ab_model(std::size_t T);

/// y_{it} = alpha_i + theta y_{i,t-1} + e_{it} with alpha_i ~ N(0,1),
/// e_{it} = u_{it} + ma u_{i,t-1}, u ~ N(0,1) and y_{i1} drawn from the
/// stationary law of the ma = 0 process. Returns n rows of T columns.
[[nodiscard]] Sample simulate_dynamic_panel(std::size_t n, std::size_t T, double theta, const RngState& rng,
                                            double ma = 0.0);

/// K B-splines of degree min(2, K-1) on equally spaced knots over [lo, hi].
/// Arguments outside the interval are clamped to it.
class SplineBasis {
public:
    SplineBasis(std::size_t K, double lo, double hi);

    [[nodiscard]] std::size_t size() const noexcept { return K_; }
    [[nodiscard]] std::size_t degree() const noexcept { return degree_; }
    [[nodiscard]] double lower() const noexcept { return lo_; }
    [[nodiscard]] double upper() const noexcept { return hi_; }

    /// Writes all K basis values at w into out.
    void evaluate(double w, std::span<double> out) const;
    [[nodiscard]] std::vector<double> operator()(double w) const;

private:
    std::size_t K_;
    std::size_t degree_;
    double lo_;
    double hi_;
    std::vector<double> knots_;
};

/// Residual vector rho(x, theta) of length j for a conditional moment
/// restriction E[rho(X, theta_0) | W] = 0.
struct ConditionalMomentSpec {
    std::string name;
    std::size_t q = 1;
    std::size_t j = 1;
    Box theta_bounds;
    MomentFn rho;
    bool affine_in_theta = false;
};

/// g(x, theta) = rho(x, theta) (x) q^K(w) with w the last entry of x,
/// ordered as g[jj * K + k] = rho_jj * b_k(w). d = j K.
[[nodiscard]] MomentModel conditional_spline_model(const ConditionalMomentSpec& spec, std::size_t K, double w_lo,
                                                   double w_hi);

/// Same, with the basis range taken from the last column of `data`.
[[nodiscard]] MomentModel conditional_spline_model(const ConditionalMomentSpec& spec, std::size_t K,
                                                   const Sample& data);

/// Columns (y, x, w) with rho = y - theta x, theta in [-10, 10].
[[nodiscard]] ConditionalMomentSpec linear_iv_spec();

}  // namespace qfboot
