#include "qfboot/models.hpp"

#include "qfboot/errors.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

namespace qfboot {

MomentModel panel_ab_model(std::size_t T) {
    if (T < 3) {
        throw InvalidArgumentError("panel_ab_model requires T >= 3, got " + std::to_string(T));
    }
    MomentModel m;
    m.name = "panel:" + std::to_string(T);
    m.q = 1;
    m.d = (T - 2) * (T - 1) / 2;
    m.theta_bounds = Box{Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)};
    m.affine_in_theta = true;
    m.g = [T](std::span<const double> y, std::span<const double> theta, std::span<double> out) {
        if (y.size() != T) {
            throw DimensionError("panel observation has " + std::to_string(y.size()) + " periods, expected " +
                                 std::to_string(T));
        }
        std::size_t k = 0;
        // y[t - 1] is y_t in 1-based time.
        for (std::size_t t = 3; t <= T; ++t) {
            const double resid = (y[t - 1] - y[t - 2]) - theta[0] * (y[t - 2] - y[t - 3]);
            for (std::size_t s = 2; s <= t - 1; ++s) {
                out[k++] = resid * y[t - s - 1];
            }
        }
    };
    return m;
}

Sample simulate_dynamic_panel(std::size_t n, std::size_t T, double theta, const RngState& rng, double ma) {
    if (n == 0 || T == 0) {
        throw InvalidArgumentError("simulate_dynamic_panel needs n >= 1 and T >= 1");
    }
    if (!(std::abs(theta) < 1.0)) {
        throw InvalidArgumentError("simulate_dynamic_panel needs |theta| < 1");
    }
    Engine engine = make_engine(rng);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T));
    const double sd1 = 1.0 / std::sqrt(1.0 - theta * theta);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const double alpha = normal(engine);
        double u_prev = normal(engine);
        y(i, 0) = alpha / (1.0 - theta) + sd1 * u_prev;
        for (Eigen::Index t = 1; t < y.cols(); ++t) {
            const double u = normal(engine);
            y(i, t) = alpha + theta * y(i, t - 1) + u + ma * u_prev;
            u_prev = u;
        }
    }
    return Sample(std::move(y));
}

SplineBasis::SplineBasis(std::size_t K, double lo, double hi) : K_(K), degree_(0), lo_(lo), hi_(hi) {
    if (K < 1) {
        throw InvalidArgumentError("spline basis needs K >= 1");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidArgumentError("spline basis needs a finite range lo < hi");
    }
    degree_ = std::min<std::size_t>(2, K - 1);
    const std::size_t interior = K - degree_ - 1;
    knots_.assign(degree_ + 1, lo);
    for (std::size_t k = 1; k <= interior; ++k) {
        knots_.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(interior + 1));
    }
    knots_.insert(knots_.end(), degree_ + 1, hi);
}

void SplineBasis::evaluate(double w, std::span<double> out) const {
    if (out.size() != K_) {
        throw DimensionError("spline output buffer has the wrong length");
    }
    std::fill(out.begin(), out.end(), 0.0);
    const double x = std::clamp(w, lo_, hi_);
    const std::size_t p = degree_;
    // Knot span index: knots_[span] <= x < knots_[span + 1], last span at hi.
    std::size_t span = K_ - 1;
    if (x < hi_) {
        span = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), x) - knots_.begin()) - 1;
    }
    // Cox-de Boor triangle for the p + 1 nonzero functions.
    double nonzero[3] = {1.0, 0.0, 0.0};
    double left[3] = {0.0, 0.0, 0.0};
    double right[3] = {0.0, 0.0, 0.0};
    for (std::size_t j = 1; j <= p; ++j) {
        left[j] = x - knots_[span + 1 - j];
        right[j] = knots_[span + j] - x;
        double saved = 0.0;
        for (std::size_t r = 0; r < j; ++r) {
            const double temp = nonzero[r] / (right[r + 1] + left[j - r]);
            nonzero[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        nonzero[j] = saved;
    }
    for (std::size_t j = 0; j <= p; ++j) {
        out[span - p + j] = nonzero[j];
    }
}

std::vector<double> SplineBasis::operator()(double w) const {
    std::vector<double> out(K_);
    evaluate(w, out);
    return out;
}

MomentModel conditional_spline_model(const ConditionalMomentSpec& spec, std::size_t K, double w_lo, double w_hi) {
    if (K < 1) {
        throw InvalidArgumentError("conditional_spline_model requires K >= 1");
    }
    if (spec.j == 0 || !spec.rho) {
        throw InvalidArgumentError("conditional moment spec needs j >= 1 and a residual function");
    }
    auto basis = std::make_shared<const SplineBasis>(K, w_lo, w_hi);
    MomentModel m;
    m.name = spec.name + ":spline" + std::to_string(K);
    m.q = spec.q;
    m.d = spec.j * K;
    m.theta_bounds = spec.theta_bounds;
    m.affine_in_theta = spec.affine_in_theta;
    m.g = [basis, rho = spec.rho, j = spec.j, K](std::span<const double> x, std::span<const double> theta,
                                                  std::span<double> out) {
        if (x.empty()) {
            throw DimensionError("conditional moment observation is empty");
        }
        std::vector<double> r(j);
        std::vector<double> b(K);
        rho(x, theta, r);
        basis->evaluate(x.back(), b);
        for (std::size_t jj = 0; jj < j; ++jj) {
            for (std::size_t k = 0; k < K; ++k) {
                out[jj * K + k] = r[jj] * b[k];
            }
        }
    };
    m.validate();
    return m;
}

MomentModel conditional_spline_model(const ConditionalMomentSpec& spec, std::size_t K, const Sample& data) {
    const Eigen::VectorXd w = data.values().col(data.values().cols() - 1);
    double lo = w.minCoeff();
    double hi = w.maxCoeff();
    if (!(lo < hi)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return conditional_spline_model(spec, K, lo, hi);
}

ConditionalMomentSpec linear_iv_spec() {
    ConditionalMomentSpec spec;
    spec.name = "linear_iv";
    spec.q = 1;
    spec.j = 1;
    spec.theta_bounds = Box{Eigen::VectorXd::Constant(1, -10.0), Eigen::VectorXd::Constant(1, 10.0)};
    spec.affine_in_theta = true;
    spec.rho = [](std::span<const double> x, std::span<const double> theta, std::span<double> out) {
        if (x.size() < 3) {
            throw DimensionError("linear_iv rows need columns (y, x, w)");
        }
        out[0] = x[0] - theta[0] * x[1];
    };
    return spec;
}

}  // namespace qfboot
